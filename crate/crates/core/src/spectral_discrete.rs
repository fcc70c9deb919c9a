//! Discrete spectral decomposition of `J_t` on `l2(Z)`: the point spectrum
//! `{q^n} U {-q^r/t}`, closed-form eigenvector norms and residues, the
//! orthogonality relations of `S_n` and `M_r^{(t)}` under `mu_t`, and
//! eigenbasis expansion.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std when a dependency links it
use num_traits::Float;

use crate::eigenfunctions::{lattice_phi_parts, sw_polynomial_scaled};
use crate::jacobi::{JacobiOperator, Sequence};
use crate::measures::check_window;
use crate::qcore::{qpoch, qpoch_inf, qpoch_inf_many, triple_product_norm, QContext, Window};
use crate::{Error, Result, C64};

/// Label of a point of the point spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKind {
    /// `q^n`, eigenvector `psi(q^n) ~ S_n`.
    Pos { n: u32 },
    /// `-q^r / t`, eigenvector `psi(-q^r/t) ~ M_r^{(t)}`.
    Neg { r: i64 },
}

impl core::fmt::Display for PointKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PointKind::Pos { n } => write!(f, "q^{n}"),
            PointKind::Neg { r } => write!(f, "-q^{r}/t"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub value: f64,
    pub kind: PointKind,
    /// `||psi(value)||^2` from the closed forms.
    pub norm_sq: f64,
}

impl SpectralPoint {
    pub fn new(ctx: &QContext, t: f64, kind: PointKind) -> Self {
        match kind {
            PointKind::Pos { n } => SpectralPoint {
                value: ctx.qpow(n as i64),
                kind,
                norm_sq: norm_sq_pos(ctx, t, n),
            },
            PointKind::Neg { r } => SpectralPoint {
                value: -ctx.qpow(r) / t,
                kind,
                norm_sq: norm_sq_neg(ctx, t, r),
            },
        }
    }
}

/// `{q^n : n <= nmax} U {-q^r/t : rmin <= r <= rmax}`. Zero, the
/// accumulation point, is never included.
pub fn spectrum_points(
    ctx: &QContext,
    t: f64,
    nmax: u32,
    rmin: i64,
    rmax: i64,
) -> Vec<SpectralPoint> {
    (0..=nmax)
        .map(|n| PointKind::Pos { n })
        .chain((rmin..=rmax).map(|r| PointKind::Neg { r }))
        .map(|k| SpectralPoint::new(ctx, t, k))
        .collect()
}

/// `||psi(q^n)||^2 = (q;q)_n / q^n (-tq, -1/t, q; q)_inf`.
pub fn norm_sq_pos(ctx: &QContext, t: f64, n: u32) -> f64 {
    let qq = qpoch(ctx, ctx.q(), n as i64).expect("(q;q)_n has no poles");
    qq * ctx.qpow(-(n as i64)) * triple_product_norm(ctx, t)
}

/// `||psi(-q^r/t)||^2 = (-q/t;q)_r / q^r (-t, q, q; q)_inf`.
pub fn norm_sq_neg(ctx: &QContext, t: f64, r: i64) -> f64 {
    let p = qpoch(ctx, -ctx.q() / t, r).expect("(-q/t;q)_r has no poles for t > 0");
    let qq = qpoch_inf(ctx, ctx.q());
    p * ctx.qpow(-r) * qpoch_inf(ctx, -t) * qq * qq
}

/// `ln ||psi(-q^r/t)||^2`, safe for large `|r|`.
pub fn ln_norm_sq_neg(ctx: &QContext, t: f64, r: i64) -> f64 {
    let q = ctx.q();
    // ln (-q/t;q)_r
    let lp: f64 = if r >= 0 {
        (0..r).map(|i| (q * ctx.qpow(i) / t).ln_1p()).sum()
    } else {
        -(1..=-r).map(|i| (ctx.qpow(1 - i) / t).ln_1p()).sum::<f64>()
    };
    let qq = qpoch_inf(ctx, q).ln();
    lp - r as f64 * ctx.ln_q() + crate::qcore::ln_qpoch_inf_neg(ctx, t) + 2.0 * qq
}

/// Closed-form residue of `1 / W(z)` at a spectral point.
pub fn residue_inv_wronskian(ctx: &QContext, t: f64, xi: &SpectralPoint) -> f64 {
    match xi.kind {
        PointKind::Pos { n } => {
            let n = n as i64;
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            let qq = qpoch(ctx, ctx.q(), n).expect("(q;q)_n has no poles");
            sign * t.powi(n as i32) * ctx.qpow(n * (n + 1)) / (qq * triple_product_norm(ctx, t))
        }
        PointKind::Neg { r } => {
            let sign = if r % 2 == 0 { -1.0 } else { 1.0 };
            let p = qpoch(ctx, -ctx.q() / t, r).expect("(-q/t;q)_r has no poles for t > 0");
            let tail = qpoch_inf_many(ctx, &[-t, ctx.q(), ctx.q()]);
            sign * ctx.qpow(r * (r + 1)) / (t.powi(r as i32) * p * tail)
        }
    }
}

/// `1 / W'(xi)` with `W` from the eigenvector sequences at `k = 0` and a
/// central difference of step `rel_step * |xi|`.
pub fn residue_finite_difference(
    op: &JacobiOperator,
    xi: &SpectralPoint,
    rel_step: f64,
) -> Result<f64> {
    let h = rel_step * xi.value.abs();
    let wp = op.wronskian(C64::new(xi.value + h, 0.0), 0)?;
    let wm = op.wronskian(C64::new(xi.value - h, 0.0), 0)?;
    Ok(2.0 * h / (wp - wm).re)
}

/// `psi_k(xi)` for `k` in `window`, evaluated so that neither tail
/// overflows: `S_n` term by term in log form, `M_r^{(t)}` via the lattice
/// reflection.
pub fn eigenvector(ctx: &QContext, t: f64, kind: PointKind, window: Window) -> Result<Vec<f64>> {
    scaled_eigenvector(ctx, t, kind, window, 0.0)
}

/// `psi(xi) / ||psi(xi)||` with the closed-form norm; stays finite when the
/// norm itself under- or overflows.
pub fn unit_eigenvector(
    ctx: &QContext,
    t: f64,
    kind: PointKind,
    window: Window,
) -> Result<Vec<f64>> {
    scaled_eigenvector(ctx, t, kind, window, -0.5 * ln_norm_sq(ctx, t, kind))
}

fn ln_norm_sq(ctx: &QContext, t: f64, kind: PointKind) -> f64 {
    match kind {
        PointKind::Pos { n } => norm_sq_pos(ctx, t, n).ln(),
        PointKind::Neg { r } => ln_norm_sq_neg(ctx, t, r),
    }
}

fn scaled_eigenvector(
    ctx: &QContext,
    t: f64,
    kind: PointKind,
    window: Window,
    ln_scale: f64,
) -> Result<Vec<f64>> {
    let lt = t.ln();
    let lq = ctx.ln_q();
    let ln_pref = |k: i64| {
        let kf = k as f64;
        0.5 * kf * lt + kf * (kf + 1.0) / 4.0 * lq + ln_scale
    };
    match kind {
        PointKind::Pos { n } => {
            let qq = qpoch(ctx, ctx.q(), n as i64).expect("(q;q)_n has no poles");
            Ok(window
                .iter()
                .map(|k| qq * sw_polynomial_scaled(ctx, n, t * ctx.qpow(k), ln_pref(k)))
                .collect())
        }
        PointKind::Neg { r } => window
            .iter()
            .map(|k| {
                let (s, lp) = lattice_phi_parts(ctx, r, t, k)?;
                Ok(s * (lp + ln_pref(k)).exp())
            })
            .collect(),
    }
}

fn windowed_dot(ctx: &QContext, window: Window, a: &[f64], b: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    let mut abs = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
        abs += (x * y).abs();
    }
    let n = a.len();
    check_window(ctx, window, a[0] * b[0], a[n - 1] * b[n - 1], abs)?;
    Ok(s)
}

/// `sum_k psi_k(xi)^2` over the window.
pub fn norm_sq_direct(ctx: &QContext, t: f64, kind: PointKind, window: Window) -> Result<f64> {
    let v = eigenvector(ctx, t, kind, window)?;
    windowed_dot(ctx, window, &v, &v)
}

/// Which orthogonality relation a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `sum_k t^k q^{C(k+1,2)} S_n S_m / (-tq,-1/t,q;q)_inf = delta / (q^n (q;q)_n)`
    Sn,
    /// `sum_k t^k q^{C(k+1,2)} M_r M_s / (-t;q)_inf = (-q/t;q)_r / q^r delta`
    Mr,
    /// `sum_k t^k q^{C(k+1,2)} S_n M_r = 0`
    Ms,
}

impl Relation {
    pub fn name(&self) -> &'static str {
        match self {
            Relation::Sn => "OR-Sn",
            Relation::Mr => "OR-Mr",
            Relation::Ms => "OR-MS",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrReport {
    pub relation: Relation,
    pub indices: (i64, i64),
    pub value: f64,
    pub target: f64,
    /// `|value - target|`
    pub residual: f64,
    pub window: Window,
}

impl OrReport {
    fn new(
        relation: Relation,
        indices: (i64, i64),
        value: f64,
        target: f64,
        window: Window,
    ) -> Self {
        OrReport {
            relation,
            indices,
            value,
            target,
            residual: (value - target).abs(),
            window,
        }
    }

    /// `residual / |target|`, or the residual itself for a zero target.
    pub fn relative(&self) -> f64 {
        if self.target == 0.0 {
            self.residual
        } else {
            self.residual / self.target.abs()
        }
    }
}

fn qq(ctx: &QContext, n: u32) -> f64 {
    qpoch(ctx, ctx.q(), n as i64).expect("(q;q)_n has no poles")
}

pub fn verify_or_sn(ctx: &QContext, t: f64, n: u32, m: u32, window: Window) -> Result<OrReport> {
    let a = eigenvector(ctx, t, PointKind::Pos { n }, window)?;
    let b = eigenvector(ctx, t, PointKind::Pos { n: m }, window)?;
    let value = windowed_dot(ctx, window, &a, &b)?
        / (qq(ctx, n) * qq(ctx, m) * triple_product_norm(ctx, t));
    let target = if n == m {
        1.0 / (ctx.qpow(n as i64) * qq(ctx, n))
    } else {
        0.0
    };
    Ok(OrReport::new(
        Relation::Sn,
        (n as i64, m as i64),
        value,
        target,
        window,
    ))
}

pub fn verify_or_mr(ctx: &QContext, t: f64, r: i64, s: i64, window: Window) -> Result<OrReport> {
    let a = eigenvector(ctx, t, PointKind::Neg { r }, window)?;
    let b = eigenvector(ctx, t, PointKind::Neg { r: s }, window)?;
    let qinf = qpoch_inf(ctx, ctx.q());
    let value = windowed_dot(ctx, window, &a, &b)? / (qinf * qinf * qpoch_inf(ctx, -t));
    let target = if r == s {
        qpoch(ctx, -ctx.q() / t, r)? * ctx.qpow(-r)
    } else {
        0.0
    };
    Ok(OrReport::new(Relation::Mr, (r, s), value, target, window))
}

pub fn verify_or_ms(ctx: &QContext, t: f64, n: u32, r: i64, window: Window) -> Result<OrReport> {
    let a = eigenvector(ctx, t, PointKind::Pos { n }, window)?;
    let b = eigenvector(ctx, t, PointKind::Neg { r }, window)?;
    let value = windowed_dot(ctx, window, &a, &b)? / (qq(ctx, n) * qpoch_inf(ctx, ctx.q()));
    Ok(OrReport::new(
        Relation::Ms,
        (n as i64, r),
        value,
        0.0,
        window,
    ))
}

/// Gram matrix of `{S_n}_{n <= nmax} U {M_r}_{|r| <= rmax}` under the
/// probability measure `mu_t`, with the closed-form diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub labels: Vec<PointKind>,
    pub entries: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl GramMatrix {
    /// Largest off-diagonal entry within the `S` block or the `M` block.
    pub fn max_offdiag(&self) -> f64 {
        self.fold_pairs(|a, b| core::mem::discriminant(&a) == core::mem::discriminant(&b))
    }

    /// Largest entry pairing an `S_n` with an `M_r`.
    pub fn max_cross(&self) -> f64 {
        self.fold_pairs(|a, b| core::mem::discriminant(&a) != core::mem::discriminant(&b))
    }

    /// Largest relative deviation of the diagonal from its closed form.
    pub fn max_diag_rel(&self) -> f64 {
        (0..self.labels.len())
            .map(|i| ((self.entries[i][i] - self.targets[i]) / self.targets[i]).abs())
            .fold(0.0, f64::max)
    }

    fn fold_pairs<F: Fn(PointKind, PointKind) -> bool>(&self, keep: F) -> f64 {
        let n = self.labels.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j && keep(self.labels[i], self.labels[j]) {
                    worst = worst.max(self.entries[i][j].abs());
                }
            }
        }
        worst
    }
}

pub fn or_gram(ctx: &QContext, t: f64, nmax: u32, rmax: i64, window: Window) -> Result<GramMatrix> {
    let theta = triple_product_norm(ctx, t);
    let qinf = qpoch_inf(ctx, ctx.q());
    let mut labels = Vec::new();
    let mut funcs = Vec::new();
    let mut targets = Vec::new();
    // lattice values f(tq^k) scaled by sqrt(m_t(k)) so Gram entries are plain dot products
    for n in 0..=nmax {
        let kind = PointKind::Pos { n };
        let scale = 1.0 / (qq(ctx, n) * theta.sqrt());
        let v = eigenvector(ctx, t, kind, window)?;
        funcs.push(v.iter().map(|x| x * scale).collect::<Vec<_>>());
        labels.push(kind);
        targets.push(1.0 / (ctx.qpow(n as i64) * qq(ctx, n)));
    }
    for r in -rmax..=rmax {
        let kind = PointKind::Neg { r };
        let scale = 1.0 / (qinf * theta.sqrt());
        let v = eigenvector(ctx, t, kind, window)?;
        funcs.push(v.iter().map(|x| x * scale).collect::<Vec<_>>());
        labels.push(kind);
        targets.push(qpoch(ctx, -ctx.q() / t, r)? * ctx.qpow(-r) * qpoch_inf(ctx, -t) / theta);
    }
    let mut entries = Vec::with_capacity(funcs.len());
    for a in &funcs {
        let mut row = Vec::with_capacity(funcs.len());
        for b in &funcs {
            row.push(windowed_dot(ctx, window, a, b)?);
        }
        entries.push(row);
    }
    Ok(GramMatrix {
        labels,
        entries,
        targets,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    /// `c_xi = <v, psi(xi)> / ||psi(xi)||^2`
    pub coeffs: Vec<(SpectralPoint, f64)>,
    /// `||v - sum c_xi psi(xi)||` over the window
    pub reconstruction_error: f64,
    /// `| ||v||^2 - sum c_xi^2 ||psi(xi)||^2 |`
    pub parseval_defect: f64,
}

/// Expand a finitely supported `v` in the eigenvectors of the truncated
/// point spectrum. `v` must lie inside `window`.
pub fn expand(
    ctx: &QContext,
    t: f64,
    v: &Sequence<f64>,
    nmax: u32,
    rmin: i64,
    rmax: i64,
    window: Window,
) -> Result<Expansion> {
    let vw: Vec<f64> = window.iter().map(|k| v.get(k)).collect();
    let mut recon = alloc::vec![0.0; window.len()];
    let mut coeffs = Vec::new();
    let mut captured = 0.0;
    for xi in spectrum_points(ctx, t, nmax, rmin, rmax) {
        let u = unit_eigenvector(ctx, t, xi.kind, window)?;
        let m: f64 = u.iter().map(|x| x * x).sum();
        if !((m - 1.0).abs() < 1e-8) {
            return Err(Error::Domain {
                reason: "eigenvector not resolved on the window",
            });
        }
        let a = vw.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
        for (acc, p) in recon.iter_mut().zip(&u) {
            *acc += a * p;
        }
        captured += a * a;
        coeffs.push((xi, a * (-0.5 * ln_norm_sq(ctx, t, xi.kind)).exp()));
    }
    let norm: f64 = vw.iter().map(|x| x * x).sum();
    let err: f64 = vw
        .iter()
        .zip(&recon)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(Expansion {
        coeffs,
        reconstruction_error: err,
        parseval_defect: (norm - captured).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn points() {
        let c = ctx(0.5);
        let pts = spectrum_points(&c, 1.0, 2, -1, 1);
        let vals: Vec<f64> = pts.iter().map(|p| p.value).collect();
        assert_eq!(vals, alloc::vec![1.0, 0.5, 0.25, -2.0, -1.0, -0.5]);
        assert!(pts.iter().all(|p| p.value != 0.0 && p.norm_sq > 0.0));
        assert!(spectrum_points(&c, 3.0, 0, 5, 4)
            .iter()
            .all(|p| p.value != 0.0));
    }

    #[test]
    fn closed_norms() {
        let c = ctx(0.5);
        let mu0 = crate::measures::LatticeMeasure::new(&c, 1.0)
            .unwrap()
            .mass0();
        assert!((norm_sq_pos(&c, 1.0, 0) - 1.0 / mu0).abs() < 1e-13);
        for n in 0..6 {
            let ratio = norm_sq_pos(&c, 1.0, n + 1) / norm_sq_pos(&c, 1.0, n);
            assert!((ratio - (1.0 - c.qpow(n as i64 + 1)) / 0.5).abs() < 1e-13);
        }
        let r0 = qpoch_inf_many(&c, &[-1.0, 0.5, 0.5]);
        assert!((norm_sq_neg(&c, 1.0, 0) - r0).abs() < 1e-14);
        assert!(norm_sq_neg(&c, 1.0, -1) > 0.0);
        for r in [-7, -1, 0, 3, 9] {
            for t in [0.3, 1.0, 2.0] {
                let a = ln_norm_sq_neg(&c, t, r);
                assert!((a - norm_sq_neg(&c, t, r).ln()).abs() < 1e-12);
            }
        }
        let w = c.window();
        let d = norm_sq_direct(&c, 1.0, PointKind::Pos { n: 3 }, w).unwrap();
        assert!((d / norm_sq_pos(&c, 1.0, 3) - 1.0).abs() < 1e-10);
        let d = norm_sq_direct(&c, 1.0, PointKind::Neg { r: 1 }, w).unwrap();
        assert!((d / norm_sq_neg(&c, 1.0, 1) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stable_vectors_match_sequences() {
        let c = ctx(0.5);
        let op = JacobiOperator::new(&c, 0.7).unwrap();
        let w = Window::new(-4, 6);
        for kind in [
            PointKind::Pos { n: 2 },
            PointKind::Neg { r: -1 },
            PointKind::Neg { r: 2 },
        ] {
            let xi = SpectralPoint::new(&c, 0.7, kind);
            let v = eigenvector(&c, 0.7, kind, w).unwrap();
            for (i, k) in w.iter().enumerate() {
                let direct = op.psi(C64::new(xi.value, 0.0), k).unwrap().re;
                assert!(
                    (v[i] - direct).abs() < 1e-11 * (1.0 + direct.abs()),
                    "{kind:?} k={k}"
                );
            }
        }
    }

    #[test]
    fn residues() {
        let c = ctx(0.5);
        let op = JacobiOperator::new(&c, 1.0).unwrap();
        for kind in [PointKind::Pos { n: 1 }, PointKind::Neg { r: 1 }] {
            let xi = SpectralPoint::new(&c, 1.0, kind);
            let closed = residue_inv_wronskian(&c, 1.0, &xi);
            let fd = residue_finite_difference(&op, &xi, 1e-6).unwrap();
            assert!((fd / closed - 1.0).abs() < 1e-5, "{kind:?}: {fd} {closed}");
        }
        let s: Vec<f64> = (0..4)
            .map(|n| {
                residue_inv_wronskian(&c, 1.0, &SpectralPoint::new(&c, 1.0, PointKind::Pos { n }))
                    .signum()
            })
            .collect();
        assert_eq!(s, alloc::vec![-1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn orthogonality_examples() {
        let c = ctx(0.5);
        let w = c.window();
        assert!(verify_or_sn(&c, 1.0, 0, 0, w).unwrap().residual < 1e-12);
        assert!(verify_or_sn(&c, 1.0, 2, 5, w).unwrap().residual < 1e-10);
        assert!(verify_or_sn(&c, 0.25, 4, 4, w).unwrap().relative() < 1e-10);
        assert!(verify_or_mr(&c, 1.0, 0, 0, w).unwrap().relative() < 1e-10);
        assert!(verify_or_mr(&c, 1.0, 0, 2, w).unwrap().residual < 1e-10);
        let rep = verify_or_mr(&c, 1.0, -1, -1, w).unwrap();
        let expect = qpoch(&c, -0.5, -1).unwrap() * 0.5;
        assert!((rep.target - expect).abs() < 1e-15 && rep.relative() < 1e-10);
        assert!(verify_or_ms(&c, 1.0, 0, 0, w).unwrap().residual < 1e-10);
        assert!(verify_or_ms(&c, 0.25, 3, -2, w).unwrap().residual < 1e-9);
        assert!(matches!(
            verify_or_sn(&c, 1.0, 3, 3, Window::new(-5, 5)),
            Err(Error::Window { .. })
        ));
    }

    #[test]
    fn gram() {
        let c = ctx(0.5);
        let g = or_gram(&c, 1.0, 6, 4, c.window()).unwrap();
        assert_eq!(g.labels.len(), 16);
        assert!(g.max_offdiag() < 1e-9);
        assert!(g.max_cross() < 1e-9);
        assert!(g.max_diag_rel() < 1e-9);
    }

    #[test]
    fn parseval_decreases() {
        let c = ctx(0.5);
        let w = c.window();
        for k in [-2, 0, 3] {
            let v: Sequence<f64> = Sequence::unit(k);
            let d: Vec<f64> = [10, 20, 30]
                .iter()
                .map(|&m| {
                    expand(&c, 1.0, &v, m as u32, -m, m, w)
                        .unwrap()
                        .parseval_defect
                })
                .collect();
            assert!(d[1] < d[0] && d[2] < d[1], "e_{k}: {d:?}");
        }
        // deep negative r: the norm underflows but the unit vector does not
        let v: Sequence<f64> = Sequence::unit(-2);
        let ex = expand(&c, 1.0, &v, 30, -60, 30, w).unwrap();
        assert!(ex.parseval_defect.is_finite());
        assert!(matches!(
            expand(&c, 1.0, &v, 45, -5, 5, w),
            Err(Error::Domain { .. })
        ));
        let u = unit_eigenvector(&c, 1.0, PointKind::Neg { r: -70 }, w).unwrap();
        let n: f64 = u.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expansion() {
        let c = ctx(0.5);
        let w = c.window();
        let e0: Sequence<f64> = Sequence::unit(0);
        let ex = expand(&c, 1.0, &e0, 25, -25, 25, w).unwrap();
        assert!(ex.parseval_defect < 1e-8, "{}", ex.parseval_defect);
        let psi2 = eigenvector(&c, 1.0, PointKind::Pos { n: 2 }, w).unwrap();
        let v = Sequence::new(w.kmin, psi2);
        let ex = expand(&c, 1.0, &v, 6, -6, 6, w).unwrap();
        for (xi, coef) in &ex.coeffs {
            if xi.kind == (PointKind::Pos { n: 2 }) {
                assert!((coef - 1.0).abs() < 1e-10);
            } else {
                assert!(coef.abs() < 1e-8, "{:?} {coef}", xi.kind);
            }
        }
        assert!(ex.reconstruction_error < 1e-8);
    }
}
