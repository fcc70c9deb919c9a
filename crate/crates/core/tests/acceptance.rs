//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Lines go straight to stdout so they show even when the harness captures
//! output. Two criteria cannot be met at their stated truncation because the
//! neglected tail alone exceeds the tolerance; they are reported as FAIL and
//! held to exactly that shape (see `KNOWN_TRUNCATION_LIMITS`). Any other
//! failure, or either of those starting to pass, fails the test.

use std::io::Write;

use qspec_core::eigenfunctions::rogers_ramanujan;
use qspec_core::verify::{run, Check, Suite, VerifyConfig};
use qspec_core::QContext;

struct Outcome {
    label: &'static str,
    checks: Vec<Check>,
}

impl Outcome {
    fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }

    fn line(&self, id: usize) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} criterion {id:>2}: {} ({} checks)",
            self.label,
            self.checks.len()
        );
        for c in self.checks.iter().filter(|c| !c.pass()) {
            s += &format!(
                "\n       {} / {}: {:.3e} > {:.0e}",
                c.group, c.name, c.residual, c.tolerance
            );
        }
        s
    }
}

fn cfg(q: f64) -> VerifyConfig {
    VerifyConfig::new(QContext::new(q).unwrap())
}

fn groups(suite: Suite, cfg: &VerifyConfig, keep: &[&str]) -> Vec<Check> {
    run(suite, cfg)
        .into_iter()
        .filter(|c| keep.contains(&c.group))
        .collect()
}

/// `1 / prod_k (1 - q^(5k+a))(1 - q^(5k+b))`, multiplied out until the
/// factors are 1 to machine precision.
fn rr_product(q: f64, a: i32, b: i32) -> f64 {
    let mut p = 1.0;
    let mut k = 0;
    loop {
        let fa = q.powi(5 * k + a);
        let fb = q.powi(5 * k + b);
        if fa < 1e-18 {
            return 1.0 / p;
        }
        p *= (1.0 - fa) * (1.0 - fb);
        k += 1;
    }
}

fn rogers_ramanujan_rows() -> Vec<Check> {
    let mut rows = Vec::new();
    for q in [0.3, 0.5, 0.8] {
        let ctx = QContext::new(q).unwrap();
        for (x, a, b, name) in [(-1.0, 1, 4, "G"), (-q, 2, 3, "H")] {
            let v = rogers_ramanujan(&ctx, x).unwrap();
            rows.push(Check {
                suite: Suite::Qcore,
                group: "rogers-ramanujan",
                name: format!("{name} q={q} (direct product)"),
                residual: (v - rr_product(q, a, b)).abs(),
                tolerance: 1e-12,
            });
        }
        rows.extend(groups(Suite::Qcore, &cfg(q), &["rogers-ramanujan"]));
    }
    rows
}

/// `(criterion, failing check name)`: the tail beyond the truncation is
/// larger than the tolerance, so no implementation can pass these.
const KNOWN_TRUNCATION_LIMITS: [(usize, &str); 2] =
    [(9, "parseval e_-2"), (10, "round trip i<=8 n<=8 |j|<=30")];

#[test]
fn acceptance_criteria() {
    let base = cfg(0.5);
    let mut completeness = cfg(0.5);
    completeness.expand_nmax = 25;
    completeness.expand_rmax = 25;
    let mut continuous = cfg(0.5);
    continuous.round_trip = (8, 8, 30);

    let outcomes = [
        Outcome {
            label: "Rogers-Ramanujan identities at q in {0.3, 0.5, 0.8}",
            checks: rogers_ramanujan_rows(),
        },
        Outcome {
            label: "eigen-residuals of S_n, M_r, phi_z, Phi_z",
            checks: groups(Suite::Eigen, &base, &["eigen-residual"]),
        },
        Outcome {
            label: "Wronskian constancy, closed form and zeros",
            checks: groups(Suite::Jacobi, &base, &["wronskian"]),
        },
        Outcome {
            label: "resolvent applied to e_0",
            checks: groups(Suite::Jacobi, &base, &["resolvent"]),
        },
        Outcome {
            label: "lattice and log-normal moments",
            checks: groups(Suite::Measures, &base, &["moments"]),
        },
        Outcome {
            label: "orthogonality relations, n <= 6, |r| <= 4",
            checks: groups(Suite::Or, &base, &["or-gram"]),
        },
        Outcome {
            label: "closed-form norms and residues",
            checks: groups(Suite::Or, &base, &["norms-residues"]),
        },
        Outcome {
            label: "finite-section spectrum probe, windows 10/20/40",
            checks: groups(Suite::Jacobi, &base, &["spectrum-probe"]),
        },
        Outcome {
            label: "Parseval for e_-2, e_0, e_3 at n <= 25, |r| <= 25",
            checks: groups(Suite::Expand, &completeness, &["completeness"]),
        },
        Outcome {
            label: "continuous spectrum: isometry, Gram, Plancherel, round trip (8, 8, 30)",
            checks: groups(Suite::Plancherel, &continuous, &["continuous"]),
        },
        Outcome {
            label: "proportionality, Heine and x -> 0 lemmas",
            checks: groups(Suite::Qcore, &base, &["lemmas"]),
        },
    ];

    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (i, o) in outcomes.iter().enumerate() {
        writeln!(out, "{}", o.line(i + 1)).unwrap();
    }
    let mut unexpected = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let id = i + 1;
        let bad: Vec<&str> = o
            .checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| c.name.as_str())
            .collect();
        let known: Vec<&str> = KNOWN_TRUNCATION_LIMITS
            .iter()
            .filter(|(k, _)| *k == id)
            .map(|(_, n)| *n)
            .collect();
        if bad != known || o.checks.is_empty() {
            unexpected.push(id);
        }
    }
    writeln!(
        out,
        "criteria passed: {}/{}",
        outcomes.iter().filter(|o| o.pass()).count(),
        outcomes.len()
    )
    .unwrap();
    assert!(
        unexpected.is_empty(),
        "criteria differing from the expected outcome: {unexpected:?}"
    );

    // the same checks pass once the truncation is refined
    let mut refined = cfg(0.5);
    refined.expand_nmax = 30;
    refined.expand_rmax = 30;
    refined.round_trip = (8, 20, 30);
    let rows: Vec<Check> = groups(Suite::Expand, &refined, &["completeness"])
        .into_iter()
        .chain(groups(Suite::Plancherel, &refined, &["continuous"]))
        .collect();
    for c in &rows {
        writeln!(
            out,
            "  refined {}: {:.3e} (tol {:.0e})",
            c.name, c.residual, c.tolerance
        )
        .unwrap();
    }
    assert!(rows.iter().all(Check::pass));
}
