//! Orthogonality measures for the Stieltjes-Wigert moment sequence
//! `int x^n dmu = q^{-n(n+1)/2}`, `n` in `Z`.
//!
//! * lattice measures `mu_t` with masses `m_t(k) = t^k q^{k(k+1)/2} m_t(0)` at `t q^k`
//! * absolutely continuous weights solving `w(xq) = x w(x)` (log-normal, `w_c`)
//! * Berg-type perturbations `nu_{s,t}` built from `M_r^{(t)}`

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // shadowed by std when a dependency links it
use num_traits::Float;

use crate::eigenfunctions::qbessel_m_lattice;
use crate::qcore::{ln_qpoch_inf_neg, ln_triple_product_norm, QContext, Window};
use crate::{Error, GaussLegendre, Result};

/// Check that the two boundary terms of a bilateral sum are negligible
/// against `sum |terms|`.
pub(crate) fn check_window(
    ctx: &QContext,
    window: Window,
    first: f64,
    last: f64,
    abs_sum: f64,
) -> Result<()> {
    let bound = ctx.tol() * abs_sum;
    if first.abs() > bound || last.abs() > bound || !abs_sum.is_finite() {
        return Err(Error::Window {
            kmin: window.kmin,
            kmax: window.kmax,
        });
    }
    Ok(())
}

/// Discrete solution `mu_t` of the moment problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeMeasure {
    ctx: QContext,
    t: f64,
    ln_mass0: f64,
    window: Window,
}

impl LatticeMeasure {
    /// Probability normalization `m_t(0) = 1 / (-tq, -1/t, q; q)_inf`.
    pub fn new(ctx: &QContext, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: "must be positive",
            });
        }
        Ok(LatticeMeasure {
            ctx: *ctx,
            t,
            ln_mass0: -ln_triple_product_norm(ctx, t),
            window: ctx.window(),
        })
    }

    pub fn with_mass0(mut self, mass0: f64) -> Result<Self> {
        if !(mass0 > 0.0 && mass0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mass0",
                reason: "must be positive",
            });
        }
        self.ln_mass0 = mass0.ln();
        Ok(self)
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mass0(&self) -> f64 {
        self.ln_mass0.exp()
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn context(&self) -> &QContext {
        &self.ctx
    }

    /// Support point `t q^k`.
    pub fn point(&self, k: i64) -> f64 {
        self.t * self.ctx.qpow(k)
    }

    /// `ln m_t(k)`.
    pub fn ln_mass(&self, k: i64) -> f64 {
        k as f64 * self.t.ln() + ((k * (k + 1)) / 2) as f64 * self.ctx.ln_q() + self.ln_mass0
    }

    /// `m_t(k) = t^k q^{k(k+1)/2} m_t(0)`.
    pub fn mass(&self, k: i64) -> f64 {
        self.ln_mass(k).exp()
    }

    pub fn total_mass(&self) -> f64 {
        self.window.iter().map(|k| self.mass(k)).sum()
    }

    /// `sum_k m_t(k) f(k, t q^k)` over the window, failing if the boundary
    /// terms are not negligible.
    pub fn sum<F: FnMut(i64, f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut s = 0.0;
        let mut abs = 0.0;
        let (mut first, mut last) = (0.0, 0.0);
        for k in self.window.iter() {
            let term = self.mass(k) * f(k, self.point(k));
            if k == self.window.kmin {
                first = term;
            }
            if k == self.window.kmax {
                last = term;
            }
            s += term;
            abs += term.abs();
        }
        check_window(&self.ctx, self.window, first, last, abs)?;
        Ok(s)
    }

    /// `sum_k (t q^k)^n m_t(k)`, expected `q^{-n(n+1)/2}` for the default
    /// normalization.
    pub fn moment(&self, n: i64) -> Result<f64> {
        let lt = self.t.ln();
        let lq = self.ctx.ln_q();
        let mut s = 0.0;
        let (mut first, mut last) = (0.0, 0.0);
        for k in self.window.iter() {
            let term = (self.ln_mass(k) + n as f64 * (lt + k as f64 * lq)).exp();
            if k == self.window.kmin {
                first = term;
            }
            if k == self.window.kmax {
                last = term;
            }
            s += term;
        }
        check_window(&self.ctx, self.window, first, last, s)?;
        Ok(s)
    }

    /// `max_k |m_t(k+1) / (m_t(k) t q^{k+1}) - 1|`: zero exactly when the
    /// masses satisfy the discrete q-Pearson recurrence.
    pub fn radon_nikodym_check(&self) -> f64 {
        let lt = self.t.ln();
        let lq = self.ctx.ln_q();
        let mut worst: f64 = 0.0;
        for k in self.window.kmin..self.window.kmax {
            let d = self.ln_mass(k + 1) - self.ln_mass(k) - lt - (k + 1) as f64 * lq;
            worst = worst.max(d.exp_m1().abs());
        }
        worst
    }
}

/// Same check as [`LatticeMeasure::radon_nikodym_check`] for arbitrary
/// masses; sites with vanishing mass are skipped.
pub fn radon_nikodym_residual<F: Fn(i64) -> f64>(
    ctx: &QContext,
    t: f64,
    window: Window,
    mass: F,
) -> f64 {
    let mut worst: f64 = 0.0;
    for k in window.kmin..window.kmax {
        let (a, b) = (mass(k), mass(k + 1));
        if !(a.is_normal() && b.is_normal()) {
            continue;
        }
        worst = worst.max((b / (a * t * ctx.qpow(k + 1)) - 1.0).abs());
    }
    worst
}

/// Shape of an absolutely continuous weight on `(0, inf)`.
#[derive(Clone)]
pub enum DensityKind {
    /// `x^{-1/2} exp((ln x)^2 / (2 ln q))`
    LogNormal,
    /// `w_c(x) = x^{c-1} / (-q^{1-c} x, -q^c / x; q)_inf`
    ProductC {
        c: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::LogNormal => f.write_str("LogNormal"),
            DensityKind::ProductC { c } => f.debug_struct("ProductC").field("c", c).finish(),
            DensityKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A weight `w` with its numerically computed total mass.
#[derive(Clone, Debug)]
pub struct WeightDensity {
    ctx: QContext,
    kind: DensityKind,
    nodes: usize,
    normalization: f64,
}

impl WeightDensity {
    pub const DEFAULT_NODES: usize = 32;

    pub fn new(ctx: &QContext, kind: DensityKind) -> Result<Self> {
        if let DensityKind::ProductC { c } = kind {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "c",
                    reason: "must be positive",
                });
            }
        }
        let mut wd = WeightDensity {
            ctx: *ctx,
            kind,
            nodes: Self::DEFAULT_NODES,
            normalization: 1.0,
        };
        wd.normalization = wd.integrate_raw(|_| 1.0);
        Ok(wd)
    }

    pub fn log_normal(ctx: &QContext) -> Self {
        Self::new(ctx, DensityKind::LogNormal).expect("log-normal has no parameters")
    }

    pub fn product_c(ctx: &QContext, c: f64) -> Result<Self> {
        Self::new(ctx, DensityKind::ProductC { c })
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(ctx: &QContext, f: F) -> Self {
        Self::new(ctx, DensityKind::Custom(Arc::new(f))).expect("custom density is unchecked")
    }

    /// Change the Gauss-Legendre node count per q-interval; renormalizes.
    pub fn with_nodes(mut self, nodes: usize) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::InvalidParameter {
                name: "nodes",
                reason: "must be at least 1",
            });
        }
        self.nodes = nodes;
        self.normalization = self.integrate_raw(|_| 1.0);
        Ok(self)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn context(&self) -> &QContext {
        &self.ctx
    }

    /// Total mass of the raw weight over the context window.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Raw weight `w(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match &self.kind {
            DensityKind::Custom(f) => f(x),
            _ => self.ln_eval(x).exp(),
        }
    }

    /// `ln w(x)`; `-inf` where the weight vanishes.
    pub fn ln_eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        match &self.kind {
            DensityKind::LogNormal => {
                let l = x.ln();
                -0.5 * l + l * l / (2.0 * self.ctx.ln_q())
            }
            DensityKind::ProductC { c } => {
                let q = self.ctx.q();
                (c - 1.0) * x.ln()
                    - ln_qpoch_inf_neg(&self.ctx, q.powf(1.0 - c) * x)
                    - ln_qpoch_inf_neg(&self.ctx, q.powf(*c) / x)
            }
            DensityKind::Custom(f) => f(x).ln(),
        }
    }

    /// `w(x) / normalization`, a probability density.
    pub fn eval_normalized(&self, x: f64) -> f64 {
        self.eval(x) / self.normalization
    }

    /// `ln` of [`WeightDensity::eval_normalized`].
    pub fn ln_eval_normalized(&self, x: f64) -> f64 {
        self.ln_eval(x) - self.normalization.ln()
    }

    /// `w(xq) - x w(x)`.
    pub fn pearson_residual(&self, x: f64) -> f64 {
        self.eval(x * self.ctx.q()) - x * self.eval(x)
    }

    /// `int f w dx` over `(q^{kmax+1}, q^{kmin}]`, Gauss-Legendre on each
    /// q-interval.
    pub fn integrate_raw<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let gl = GaussLegendre::new(self.nodes);
        let w = self.ctx.window();
        let mut s = 0.0;
        for j in w.iter() {
            let (a, b) = (self.ctx.qpow(j + 1), self.ctx.qpow(j));
            s += gl.integrate(a, b, |x| {
                let wx = self.eval(x);
                if wx == 0.0 {
                    0.0
                } else {
                    wx * f(x)
                }
            });
        }
        s
    }

    /// `int f w dx / normalization`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate_raw(f) / self.normalization
    }

    /// Normalized moment `int x^n w dx / int w dx`.
    pub fn moment(&self, n: i64) -> f64 {
        self.integrate(|x| x.powi(n as i32))
    }
}

/// Berg-type solution
/// `nu_{s,t} = sum_k m_t(k) (1 + s M_r^{(t)}(t q^k) / M(r,t)) delta_{t q^k}`
/// where `M(r,t)` is the supremum of `|M_r^{(t)}|` over the window.
#[derive(Clone, Debug, PartialEq)]
pub struct BergMeasure {
    base: LatticeMeasure,
    s: f64,
    r: i64,
    bound: f64,
    m_values: Vec<f64>,
}

impl BergMeasure {
    pub fn new(ctx: &QContext, s: f64, t: f64, r: i64) -> Result<Self> {
        if !(s.abs() <= 1.0) {
            return Err(Error::Domain {
                reason: "need |s| <= 1",
            });
        }
        let base = LatticeMeasure::new(ctx, t)?;
        if !(t < ctx.qpow(r)) {
            return Err(Error::Domain {
                reason: "need t < q^r",
            });
        }
        let m_values = base
            .window()
            .iter()
            .map(|k| qbessel_m_lattice(ctx, r, t, k))
            .collect::<Result<Vec<_>>>()?;
        let bound = m_values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(BergMeasure {
            base,
            s,
            r,
            bound,
            m_values,
        })
    }

    pub fn base(&self) -> &LatticeMeasure {
        &self.base
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    /// `M(r, t)`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    fn factor(&self, k: i64) -> f64 {
        let w = self.base.window();
        if !w.contains(k) {
            return 1.0;
        }
        let m = self.m_values[(k - w.kmin) as usize];
        1.0 + self.s * m / self.bound
    }

    pub fn mass(&self, k: i64) -> f64 {
        self.base.mass(k) * self.factor(k)
    }

    pub fn moment(&self, n: i64) -> Result<f64> {
        let p = n as i32;
        self.base.sum(|k, x| x.powi(p) * self.factor(k))
    }
}

/// Mass of `nu_{s,t}` at `t q^k`.
pub fn berg_mass(ctx: &QContext, s: f64, t: f64, r: i64, k: i64) -> Result<f64> {
    Ok(BergMeasure::new(ctx, s, t, r)?.mass(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{qpoch_inf, triple_product_norm};

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn lattice_masses() {
        let c = ctx(0.5);
        let mu = LatticeMeasure::new(&c, 1.0).unwrap();
        assert!((mu.mass(0) - mu.mass0()).abs() < 1e-16);
        assert!((mu.mass0() - 1.0 / triple_product_norm(&c, 1.0)).abs() < 1e-15);
        for k in -10..=10 {
            let lhs = mu.mass(k + 1);
            let rhs = 1.0 * c.qpow(k + 1) * mu.mass(k);
            assert!((lhs - rhs).abs() <= 1e-14 * lhs);
        }
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_moments() {
        let c = ctx(0.5);
        let mu = LatticeMeasure::new(&c, 1.0).unwrap();
        assert!((mu.moment(0).unwrap() - 1.0).abs() < 1e-13);
        assert!((mu.moment(1).unwrap() - 2.0).abs() < 1e-13);
        assert!((mu.moment(-2).unwrap() - 2.0).abs() < 1e-13);
        let narrow = mu.with_window(Window::new(-3, 3));
        assert!(matches!(narrow.moment(2), Err(Error::Window { .. })));
    }

    #[test]
    fn radon_nikodym() {
        let c = ctx(0.5);
        let mu = LatticeMeasure::new(&c, 1.7).unwrap();
        assert!(mu.radon_nikodym_check() < 1e-12);
        let scaled = mu.with_mass0(5.0).unwrap();
        assert!(scaled.radon_nikodym_check() < 1e-12);
        let w = Window::new(-10, 10);
        let bumped = radon_nikodym_residual(&c, 1.7, w, |k| {
            let m = mu.mass(k);
            if k == 3 {
                1.5 * m
            } else {
                m
            }
        });
        assert!((bumped - 0.5).abs() < 1e-12);
    }

    #[test]
    fn densities() {
        let c = ctx(0.5);
        let ln = WeightDensity::log_normal(&c);
        assert!((ln.eval(1.0) - 1.0).abs() < 1e-16);
        let w1 = WeightDensity::product_c(&c, 1.0).unwrap();
        let expect = 1.0 / (qpoch_inf(&c, -1.0) * qpoch_inf(&c, -0.5));
        assert!((w1.eval(1.0) - expect).abs() < 1e-15);
        for x in [0.3, 1.0, 7.0] {
            assert!(ln.pearson_residual(x).abs() < 1e-13);
            assert!(w1.pearson_residual(x).abs() < 1e-13);
            let w2 = WeightDensity::product_c(&c, 2.3).unwrap();
            assert!(w2.pearson_residual(x).abs() < 1e-13 * (1.0 + w2.eval(x)));
        }
        let flat = WeightDensity::custom(&c, |_| 1.0);
        assert!((flat.pearson_residual(2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_multiplier_keeps_pearson() {
        let c = ctx(0.5);
        let lq = c.ln_q();
        let base = WeightDensity::log_normal(&c);
        let g = move |x: f64| 2.0 + (2.0 * core::f64::consts::PI * x.ln() / lq).sin();
        let b2 = base.clone();
        let wd = WeightDensity::custom(&c, move |x| b2.eval(x) * g(x));
        for x in [0.3, 1.0, 7.0] {
            assert!(wd.pearson_residual(x).abs() < 1e-12 * (1.0 + wd.eval(x)));
        }
    }

    #[test]
    fn log_normal_moments() {
        let c = ctx(0.5);
        let wd = WeightDensity::log_normal(&c);
        for n in 0..=8i64 {
            let exact = c.qpow(-(n * (n + 1) / 2));
            let m = wd.moment(n);
            assert!(((m - exact) / exact).abs() < 1e-10, "n={n}: {m} vs {exact}");
        }
    }

    #[test]
    fn berg() {
        let c = ctx(0.5);
        let mu = LatticeMeasure::new(&c, 0.25).unwrap();
        assert!((berg_mass(&c, 0.0, 0.25, 1, 3).unwrap() - mu.mass(3)).abs() < 1e-16);
        let nu = BergMeasure::new(&c, 1.0, 0.25, 1).unwrap();
        assert!(c.window().iter().all(|k| nu.mass(k) >= 0.0));
        for n in 0..=4i64 {
            let exact = c.qpow(-(n * (n + 1) / 2));
            let m = nu.moment(n).unwrap();
            assert!(((m - exact) / exact).abs() < 1e-9, "n={n}: {m}");
        }
        assert!(matches!(
            BergMeasure::new(&c, 1.0, 0.6, 1),
            Err(Error::Domain { .. })
        ));
    }
}
