//! Residual checks over every module, grouped into suites.
//!
//! Each check is a single `(residual, tolerance)` row; a suite passes when
//! every row does.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // shadowed by std when a dependency links it
use num_traits::Float;

use crate::eigenfunctions::{
    check_eigen_residual, heine_residual, lemma_x0_error, phi_cap_z, phi_z, proportionality_check,
    qbessel_m, rogers_ramanujan, sw_polynomial,
};
use crate::jacobi::{JacobiOperator, Sequence};
use crate::measures::{DensityKind, LatticeMeasure, WeightDensity};
use crate::qcore::{qpoch_inf, QContext, Window};
use crate::spectral_continuous::{CompactFunction, ContinuousSpectrum, Truncation};
use crate::spectral_discrete::{
    expand, norm_sq_direct, or_gram, residue_finite_difference, residue_inv_wronskian, PointKind,
    SpectralPoint,
};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Qcore,
    Eigen,
    Measures,
    Jacobi,
    Or,
    Expand,
    Plancherel,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Qcore,
        Suite::Eigen,
        Suite::Measures,
        Suite::Jacobi,
        Suite::Or,
        Suite::Expand,
        Suite::Plancherel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Qcore => "qcore",
            Suite::Eigen => "eigen",
            Suite::Measures => "measures",
            Suite::Jacobi => "jacobi",
            Suite::Or => "or",
            Suite::Expand => "expand",
            Suite::Plancherel => "plancherel",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or(Error::InvalidParameter {
                name: "suite",
                reason: "unknown suite",
            })
    }
}

/// One residual row.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    /// family of related rows, e.g. `wronskian`
    pub group: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

/// Parameters shared by the suites.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub ctx: QContext,
    pub t: f64,
    /// `S_n`, `n <= nmax`, in the Gram matrix
    pub nmax: u32,
    /// `M_r`, `|r| <= rmax`, in the Gram matrix
    pub rmax: i64,
    /// truncation of the completeness expansion
    pub expand_nmax: u32,
    pub expand_rmax: i64,
    /// finite-section windows `[-K, K]`
    pub sections: Vec<i64>,
    pub density: DensityKind,
    pub truncation: Truncation,
    /// `(imax, nmax, jmax)` for the continuous round trip
    pub round_trip: (usize, u32, i64),
}

impl VerifyConfig {
    pub fn new(ctx: QContext) -> Self {
        VerifyConfig {
            ctx,
            t: 1.0,
            nmax: 6,
            rmax: 4,
            expand_nmax: 30,
            expand_rmax: 30,
            sections: alloc::vec![10, 20, 40],
            density: DensityKind::ProductC { c: 1.0 },
            truncation: Truncation::DEFAULT,
            round_trip: (8, 20, 30),
        }
    }
}

struct Rows {
    suite: Suite,
    rows: Vec<Check>,
}

impl Rows {
    fn new(suite: Suite) -> Self {
        Rows {
            suite,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, group: &'static str, name: String, residual: f64, tolerance: f64) {
        self.rows.push(Check {
            suite: self.suite,
            group,
            name,
            residual,
            tolerance,
        });
    }

    /// Records a computation error as a failing row.
    fn push_res(
        &mut self,
        group: &'static str,
        name: String,
        residual: Result<f64>,
        tolerance: f64,
    ) {
        self.push(group, name, residual.unwrap_or(f64::INFINITY), tolerance);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn crel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Vec<Check> {
    match suite {
        Suite::Qcore => qcore_suite(cfg),
        Suite::Eigen => eigen_suite(cfg),
        Suite::Measures => measures_suite(cfg),
        Suite::Jacobi => jacobi_suite(cfg),
        Suite::Or => or_suite(cfg),
        Suite::Expand => expand_suite(cfg),
        Suite::Plancherel => plancherel_suite(cfg),
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<Check> {
    Suite::ALL.iter().flat_map(|&s| run(s, cfg)).collect()
}

fn qcore_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let q = ctx.q();
    let mut out = Rows::new(Suite::Qcore);
    if let Ok(q5) = QContext::new(q.powi(5)) {
        let g = 1.0 / (qpoch_inf(&q5, q) * qpoch_inf(&q5, q.powi(4)));
        let h = 1.0 / (qpoch_inf(&q5, q * q) * qpoch_inf(&q5, q.powi(3)));
        out.push_res(
            "rogers-ramanujan",
            format!("G(q) q={q}"),
            rogers_ramanujan(ctx, -1.0).map(|v| (v - g).abs()),
            1e-12,
        );
        out.push_res(
            "rogers-ramanujan",
            format!("H(q) q={q}"),
            rogers_ramanujan(ctx, -q).map(|v| (v - h).abs()),
            1e-12,
        );
    }
    for c in [0.5, 1.0, 2.3] {
        for (m, k) in [(0, 2), (1, -3), (-2, 1), (3, 0)] {
            out.push_res(
                "lemmas",
                format!("proportionality c={c} m={m} k={k}"),
                proportionality_check(ctx, C64::new(c, 0.0), m, k),
                1e-11,
            );
        }
    }
    for z in [C64::new(2.0, 0.0), C64::new(0.7, 0.3), C64::new(-1.5, 0.5)] {
        for x in [0.5, 1.0, 3.0] {
            out.push_res(
                "lemmas",
                format!("heine z={z} x={x}"),
                heine_residual(ctx, z, x),
                1e-11,
            );
        }
    }
    for z in [C64::new(0.3, 0.0), C64::new(0.5, 0.5)] {
        out.push_res(
            "lemmas",
            format!("x->0 limit z={z}"),
            lemma_x0_error(ctx, z, 1e-6),
            1e-5,
        );
    }
    out.rows
}

/// Residual of `L f - z f`, scaled by the size of the three terms.
fn scaled_residual<F>(ctx: &QContext, f: F, z: C64, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<C64>,
{
    let q = ctx.q();
    let size = f(x * q)?.norm() + (f(x)?.norm() + f(x / q)?.norm()) / x;
    Ok(check_eigen_residual(ctx, f, z, x)? / (1.0 + size))
}

fn eigen_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let t = cfg.t;
    let grid = [0.15, 0.4, 0.9, 1.7, 3.2];
    let mut out = Rows::new(Suite::Eigen);
    let worst = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        grid.iter().try_fold(0.0f64, |m, &x| Ok(m.max(f(x)?)))
    };
    for n in 0..=10u32 {
        let z = C64::new(ctx.qpow(n as i64), 0.0);
        let r =
            worst(&|x| scaled_residual(ctx, |y| Ok(C64::new(sw_polynomial(ctx, n, y), 0.0)), z, x));
        out.push_res("eigen-residual", format!("S_{n}"), r, 1e-10);
    }
    for r in -5..=5i64 {
        let z = C64::new(-ctx.qpow(r) / t, 0.0);
        let res = worst(&|x| {
            scaled_residual(
                ctx,
                |y| qbessel_m(ctx, r, t, y).map(|v| C64::new(v, 0.0)),
                z,
                x,
            )
        });
        out.push_res("eigen-residual", format!("M_{r} t={t}"), res, 1e-10);
    }
    let zs = [
        C64::new(0.3, 0.0),
        C64::new(1.7, 0.0),
        C64::new(-0.6, 0.05),
        C64::new(0.2, 0.5),
        C64::new(-1.0, 1.0),
        C64::new(2.0, -0.7),
        C64::new(0.05, 0.0),
        C64::new(0.0, 1.2),
        C64::new(-3.0, 0.1),
        C64::new(0.8, 0.8),
    ];
    for z in zs {
        let r = worst(&|x| scaled_residual(ctx, |y| phi_z(ctx, z, C64::new(y, 0.0)), z, x));
        out.push_res("eigen-residual", format!("phi_z z={z}"), r, 1e-10);
        let r = worst(&|x| scaled_residual(ctx, |y| phi_cap_z(ctx, z, y), z, x));
        out.push_res("eigen-residual", format!("Phi_z z={z}"), r, 1e-10);
    }
    out.rows
}

fn measures_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let mut out = Rows::new(Suite::Measures);
    let mut ts = alloc::vec![cfg.t];
    for t in [0.7, 2.3] {
        if (t - cfg.t).abs() > 1e-12 {
            ts.push(t);
        }
    }
    ts.truncate(3);
    for &t in &ts {
        let mu = match LatticeMeasure::new(ctx, t) {
            Ok(m) => m,
            Err(e) => {
                out.push_res("moments", format!("lattice t={t}"), Err(e), 1e-11);
                continue;
            }
        };
        for n in -4..=8i64 {
            let target = ctx.qpowf(-((n * (n + 1)) as f64) / 2.0);
            out.push_res(
                "moments",
                format!("lattice t={t} n={n}"),
                mu.moment(n).map(|m| rel(m, target)),
                1e-11,
            );
        }
    }
    let wd = WeightDensity::log_normal(ctx);
    for n in 0..=8i64 {
        let target = ctx.qpowf(-((n * (n + 1)) as f64) / 2.0);
        out.push(
            "moments",
            format!("log-normal n={n}"),
            rel(wd.moment(n), target),
            1e-10,
        );
    }
    out.rows
}

/// `(distance at each window, worst increase)` of `target` to the nearest
/// section eigenvalue.
pub fn section_distances(op: &JacobiOperator, sections: &[i64], target: f64) -> Result<Vec<f64>> {
    sections
        .iter()
        .map(|&k| {
            let ev = op.finite_section_spectrum(-k, k)?;
            Ok(ev
                .iter()
                .map(|e| (e - target).abs())
                .fold(f64::INFINITY, f64::min))
        })
        .collect()
}

/// Root of `W(., 0)` on the real axis bracketed around `xi`, by bisection.
fn wronskian_root(op: &JacobiOperator, xi: f64) -> Result<f64> {
    let w = |x: f64| op.wronskian_closed_form(C64::new(x, 0.0)).map(|v| v.re);
    let h = 1e-3 * xi.abs();
    let (mut a, mut b) = (xi - h, xi + h);
    let (mut fa, fb) = (w(a)?, w(b)?);
    if fa * fb > 0.0 {
        return Err(Error::NoConvergence);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = w(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

fn jacobi_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let t = cfg.t;
    let mut out = Rows::new(Suite::Jacobi);
    let op = match JacobiOperator::new(ctx, t) {
        Ok(op) => op,
        Err(e) => {
            out.push_res("wronskian", String::from("operator"), Err(e), 0.0);
            return out.rows;
        }
    };
    let zs = [
        C64::new(0.3, 0.0),
        C64::new(0.3, 0.4),
        C64::new(-0.7, 0.2),
        C64::new(1.5, -1.0),
        C64::new(0.0, 1.0),
        C64::new(-2.2, 0.0),
        C64::new(0.7, 0.0),
        C64::new(-0.1, -0.3),
        C64::new(3.0, 0.5),
        C64::new(-0.35, 0.0),
    ];
    for z in zs {
        let res = (|| {
            let w0 = op.wronskian(z, 0)?;
            let mut worst: f64 = 0.0;
            for k in -8..=8 {
                worst = worst.max(crel(op.wronskian(z, k)?, w0));
            }
            Ok(worst)
        })();
        out.push_res("wronskian", format!("k-independence z={z}"), res, 1e-9);
        let res = (|| Ok(crel(op.wronskian(z, 0)?, op.wronskian_closed_form(z)?)))();
        out.push_res("wronskian", format!("closed form z={z}"), res, 1e-10);
    }
    let points = (0..=4u32)
        .map(|n| PointKind::Pos { n })
        .chain((-4..=4).map(|r| PointKind::Neg { r }));
    for kind in points {
        let xi = SpectralPoint::new(ctx, t, kind).value;
        let res = wronskian_root(&op, xi).map(|r| (r - xi).abs());
        out.push_res("wronskian", format!("zero at {kind}"), res, 1e-10);
    }
    let e0 = Sequence::unit(0);
    for z in [C64::new(0.0, 1.0), C64::new(-1.0, 1.0), C64::new(0.0, 0.5)] {
        let res = op
            .resolvent_apply(z, &e0, Window::symmetric(20))
            .map(|u| op.resolvent_residual(z, &u, &e0));
        out.push_res("resolvent", format!("z={z}"), res, 1e-8);
    }
    let points = (0..=4u32)
        .map(|n| PointKind::Pos { n })
        .chain((-4..=4).map(|r| PointKind::Neg { r }));
    for kind in points {
        let xi = SpectralPoint::new(ctx, t, kind).value;
        match section_distances(&op, &cfg.sections, xi) {
            Ok(d) => {
                let last = *d.last().unwrap_or(&f64::INFINITY);
                let growth = d.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
                out.push("spectrum-probe", format!("distance {kind}"), last, 1e-6);
                out.push("spectrum-probe", format!("monotone {kind}"), growth, 1e-9);
            }
            Err(e) => out.push_res("spectrum-probe", format!("distance {kind}"), Err(e), 1e-6),
        }
    }
    out.rows
}

fn or_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let t = cfg.t;
    let w = ctx.window();
    let mut out = Rows::new(Suite::Or);
    match or_gram(ctx, t, cfg.nmax, cfg.rmax, w) {
        Ok(g) => {
            out.push(
                "or-gram",
                String::from("off-diagonal"),
                g.max_offdiag(),
                1e-9,
            );
            out.push("or-gram", String::from("diagonal"), g.max_diag_rel(), 1e-9);
            out.push("or-gram", String::from("cross"), g.max_cross(), 1e-9);
        }
        Err(e) => out.push_res("or-gram", String::from("gram"), Err(e), 1e-9),
    }
    let kinds = [
        PointKind::Pos { n: 0 },
        PointKind::Pos { n: 3 },
        PointKind::Pos { n: 6 },
        PointKind::Neg { r: -3 },
        PointKind::Neg { r: 0 },
        PointKind::Neg { r: 4 },
    ];
    for kind in kinds {
        let xi = SpectralPoint::new(ctx, t, kind);
        out.push_res(
            "norms-residues",
            format!("norm {kind}"),
            norm_sq_direct(ctx, t, kind, w).map(|d| rel(d, xi.norm_sq)),
            1e-10,
        );
    }
    match JacobiOperator::new(ctx, t) {
        Ok(op) => {
            let kinds = [
                PointKind::Pos { n: 0 },
                PointKind::Pos { n: 1 },
                PointKind::Pos { n: 2 },
                PointKind::Neg { r: -1 },
                PointKind::Neg { r: 0 },
                PointKind::Neg { r: 1 },
            ];
            for kind in kinds {
                let xi = SpectralPoint::new(ctx, t, kind);
                let closed = residue_inv_wronskian(ctx, t, &xi);
                out.push_res(
                    "norms-residues",
                    format!("residue {kind}"),
                    residue_finite_difference(&op, &xi, 1e-6).map(|fd| rel(fd, closed)),
                    1e-5,
                );
            }
        }
        Err(e) => out.push_res("norms-residues", String::from("operator"), Err(e), 1e-5),
    }
    out.rows
}

fn expand_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let mut out = Rows::new(Suite::Expand);
    for k in [-2, 0, 3] {
        let v: Sequence<f64> = Sequence::unit(k);
        let res = expand(
            ctx,
            cfg.t,
            &v,
            cfg.expand_nmax,
            -cfg.expand_rmax,
            cfg.expand_rmax,
            ctx.window(),
        )
        .map(|e| e.parseval_defect);
        out.push_res("completeness", format!("parseval e_{k}"), res, 1e-8);
    }
    out.rows
}

fn plancherel_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let ctx = &cfg.ctx;
    let mut out = Rows::new(Suite::Plancherel);
    let wd = match WeightDensity::new(ctx, cfg.density.clone()) {
        Ok(wd) => wd,
        Err(e) => {
            out.push_res("continuous", String::from("density"), Err(e), 0.0);
            return out.rows;
        }
    };
    let cs = ContinuousSpectrum::new(wd);
    let q = ctx.q();
    let step = CompactFunction::new(
        Window::new(0, 1),
        move |x: f64| if x > q { 1.0 } else { -0.5 },
    );
    let (a, b) = cs.isometry(&step, 64);
    out.push(
        "continuous",
        String::from("slice isometry"),
        rel(b, a),
        1e-8,
    );
    let g = cs.family_gram(3, 3, 32);
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    out.push("continuous", String::from("family gram"), worst, 1e-7);
    let ind = CompactFunction::new(Window::new(0, 0), |_: f64| 1.0);
    let tr = cfg.truncation;
    let r1 = cs.plancherel(&ind, &ind, tr).map(|r| r.defect);
    let r2 = cs.plancherel(&ind, &ind, tr.doubled()).map(|r| r.defect);
    out.push_res(
        "continuous",
        String::from("plancherel defect"),
        r1.clone(),
        1e-3,
    );
    let dec = match (r1, r2) {
        (Ok(a), Ok(b)) if b < a => Ok(0.0),
        (Ok(a), Ok(b)) => Ok(b - a),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    out.push_res(
        "continuous",
        String::from("plancherel refinement"),
        dec,
        0.0,
    );
    let (imax, nmax, jmax) = cfg.round_trip;
    let xs: Vec<f64> = (0..10)
        .map(|i| q * q * (1.0 + 0.03 + i as f64 * ((1.0 / (q * q)) - 1.0) / 10.0))
        .collect();
    let res = cs.round_trip(&step, imax, nmax, jmax, 64, &xs).map(|back| {
        xs.iter()
            .zip(&back)
            .map(|(&x, b)| (b - step.eval(ctx, x)).abs())
            .fold(0.0, f64::max)
    });
    out.push_res(
        "continuous",
        format!("round trip i<={imax} n<={nmax} |j|<={jmax}"),
        res,
        1e-4,
    );
    out.rows
}
