//! Spectral decomposition of `L` on `L2(w dx)` for an absolutely continuous
//! q-Pearson weight `w`.
//!
//! Slicing `x = t q^k` with `t` in `(q, 1]` turns `L2(w dx)` into a direct
//! integral of copies of `l2(Z)`, on each of which `L` acts as the Jacobi
//! operator `J_t`. Positive eigenvalues `q^n` do not move with `t` and give a
//! discrete part with infinite multiplicity; the negative eigenvalues
//! `-q^l/t` sweep out `(-inf, 0)` and give the transform `F` with density
//! `nu`.
//!
//! The orthonormal family spanning the discrete part is
//! `e_in(x) = f_i(t) s_n(x) / sqrt(w(t) theta(t))`, `x = t q^k`, with
//! `theta(t) = (-tq, -1/t, q; q)_inf` the total mass of the fiber measure.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std when a dependency links it
use num_traits::Float;

use crate::eigenfunctions::{lattice_phi_parts, sw_polynomial};
use crate::jacobi::Sequence;
use crate::measures::WeightDensity;
use crate::qcore::{binom2, qpoch, triple_product_norm, QContext, Window};
use crate::spectral_discrete::ln_norm_sq_neg;
use crate::{Error, GaussLegendre, Result};

/// `(k, u q^{-k})` with `u q^{-k}` in `(q, 1]`.
pub fn q_interval(ctx: &QContext, u: f64) -> (i64, f64) {
    let mut k = (u.ln() / ctx.ln_q()).ceil() as i64;
    // guard the floor/ceil against rounding at the interval ends
    while u > ctx.qpow(k) {
        k -= 1;
    }
    while u <= ctx.qpow(k + 1) {
        k += 1;
    }
    (k, u * ctx.qpow(-k))
}

/// `(l, t)` with `lambda = -q^l / t`, `t` in `(q, 1]`.
pub fn lambda_bucket(ctx: &QContext, lam: f64) -> (i64, f64) {
    let (k, t) = q_interval(ctx, -1.0 / lam);
    (-k, t)
}

/// `ln nu(lambda)`.
pub fn ln_nu(ctx: &QContext, lam: f64) -> f64 {
    let (l, t) = lambda_bucket(ctx, lam);
    l as f64 * (-lam).ln() - (l * (l + 1) / 2) as f64 * ctx.ln_q() - ln_norm_sq_neg(ctx, t, l)
}

/// `nu(lambda) = |lambda|^l q^{-l(l+1)/2} / ||psi(-q^l/t)||^2` on the
/// bucket `[-q^{l-1}, -q^l)`, `t = -q^l/lambda`. Independent of the weight.
pub fn nu(ctx: &QContext, lam: f64) -> f64 {
    ln_nu(ctx, lam).exp()
}

/// `Per(f)(x) = f(x q^{-k})` for `x` in `(q^{k+1}, q^k]`.
pub fn per_map<F: Fn(f64) -> f64>(ctx: &QContext, f: F, x: f64) -> f64 {
    f(q_interval(ctx, x).1)
}

/// `(Pf)(x) = x^{k/2} q^{-k(k+1)/4} f(x q^{-k})`; satisfies `(Pf)(xq) = sqrt(x) (Pf)(x)`.
pub fn p_map<F: Fn(f64) -> f64>(ctx: &QContext, f: F, x: f64) -> f64 {
    let (k, t) = q_interval(ctx, x);
    let kf = k as f64;
    (0.5 * kf * x.ln() - kf * (kf + 1.0) / 4.0 * ctx.ln_q()).exp() * f(t)
}

/// `s_n(x) = q^{n/2} sqrt((q;q)_n) S_n(x; q)`, orthonormal under every
/// solution of the moment problem.
pub fn orthonormal_sw(ctx: &QContext, n: u32, x: f64) -> f64 {
    let qq = qpoch(ctx, ctx.q(), n as i64).expect("(q;q)_n has no poles");
    ctx.qpowf(n as f64 / 2.0) * qq.sqrt() * sw_polynomial(ctx, n, x)
}

/// A function vanishing outside `(q^{support.kmax + 1}, q^{support.kmin}]`.
#[derive(Clone, Copy, Debug)]
pub struct CompactFunction<F> {
    pub f: F,
    pub support: Window,
}

impl<F: Fn(f64) -> f64> CompactFunction<F> {
    pub fn new(support: Window, f: F) -> Self {
        CompactFunction { f, support }
    }

    /// Value on the lattice point `t q^k`.
    pub fn at(&self, ctx: &QContext, t: f64, k: i64) -> f64 {
        if self.support.contains(k) {
            (self.f)(t * ctx.qpow(k))
        } else {
            0.0
        }
    }

    pub fn eval(&self, ctx: &QContext, x: f64) -> f64 {
        let (k, _) = q_interval(ctx, x);
        if self.support.contains(k) {
            (self.f)(x)
        } else {
            0.0
        }
    }
}

/// Orthonormal basis of `L2((q, 1], dt)`.
pub trait SliceBasis {
    fn eval(&self, ctx: &QContext, i: usize, t: f64) -> f64;
}

/// Shifted Legendre polynomials `sqrt((2i+1)/(1-q)) P_i(2(t-q)/(1-q) - 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LegendreBasis;

impl SliceBasis for LegendreBasis {
    fn eval(&self, ctx: &QContext, i: usize, t: f64) -> f64 {
        let q = ctx.q();
        let s = 2.0 * (t - q) / (1.0 - q) - 1.0;
        let (mut p0, mut p1) = (1.0, s);
        let p = if i == 0 {
            1.0
        } else {
            for m in 2..=i {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * s * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            p1
        };
        ((2 * i + 1) as f64 / (1.0 - q)).sqrt() * p
    }
}

/// `(IF)(t)`: coefficients against `e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceVector {
    pub t: f64,
    pub values: Sequence<f64>,
}

/// Truncation orders for the Plancherel pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    /// basis functions `f_i`, `i <= imax`
    pub imax: usize,
    /// orthonormal polynomials `s_n`, `n <= nmax`
    pub nmax: u32,
    /// buckets `[-q^{l-1}, -q^l)`, `|l| <= lmax`
    pub lmax: i64,
    /// Gauss-Legendre nodes per q-interval or bucket
    pub nodes: usize,
}

impl Truncation {
    pub const DEFAULT: Truncation = Truncation {
        imax: 10,
        nmax: 10,
        lmax: 25,
        nodes: 64,
    };

    /// Every order doubled.
    pub fn doubled(&self) -> Truncation {
        Truncation {
            imax: 2 * self.imax,
            nmax: 2 * self.nmax,
            lmax: 2 * self.lmax,
            nodes: 2 * self.nodes,
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlancherelReport {
    /// `int F G w dx`
    pub lhs: f64,
    /// `sum F_in G_in`
    pub rhs_discrete: f64,
    /// `int (FF)(FG) nu(l) w(-1/l) dl / l^2`
    pub rhs_continuous: f64,
    pub defect: f64,
    pub truncation: Truncation,
}

/// Spectral data for `L` on `L2(w dx)`, `w` normalized to unit mass.
#[derive(Clone, Debug)]
pub struct ContinuousSpectrum<B = LegendreBasis> {
    ctx: QContext,
    wd: WeightDensity,
    basis: B,
}

impl ContinuousSpectrum<LegendreBasis> {
    pub fn new(wd: WeightDensity) -> Self {
        ContinuousSpectrum {
            ctx: *wd.context(),
            wd,
            basis: LegendreBasis,
        }
    }
}

impl<B: SliceBasis> ContinuousSpectrum<B> {
    pub fn with_basis<C: SliceBasis>(self, basis: C) -> ContinuousSpectrum<C> {
        ContinuousSpectrum {
            ctx: self.ctx,
            wd: self.wd,
            basis,
        }
    }

    pub fn context(&self) -> &QContext {
        &self.ctx
    }

    pub fn density(&self) -> &WeightDensity {
        &self.wd
    }

    pub fn basis(&self) -> &B {
        &self.basis
    }

    /// Normalized weight.
    pub fn w(&self, x: f64) -> f64 {
        self.wd.eval_normalized(x)
    }

    fn ln_w(&self, x: f64) -> f64 {
        self.wd.ln_eval_normalized(x)
    }

    /// `(IF)(t)_k = F(t q^k) q^{k/2} sqrt(w(t q^k))` over the support of `F`.
    pub fn slice<F: Fn(f64) -> f64>(&self, f: &CompactFunction<F>, t: f64) -> SliceVector {
        let ctx = &self.ctx;
        let values = Sequence::from_fn(f.support, |k| {
            let x = t * ctx.qpow(k);
            f.at(ctx, t, k) * (ctx.qpowf(k as f64 / 2.0) * self.w(x).sqrt())
        });
        SliceVector { t, values }
    }

    /// `I^*(h)(x) = h_k(x q^{-k}) / (q^{k/2} sqrt(w(x)))` for `x` in
    /// `(q^{k+1}, q^k]`, where `h(k, t)` gives the `k`-th coefficient at `t`.
    pub fn slice_adjoint<H: Fn(i64, f64) -> f64>(&self, h: H, x: f64) -> Result<f64> {
        let w = self.w(x);
        if !(w > 0.0) {
            return Err(Error::ZeroWeight { x });
        }
        let (k, t) = q_interval(&self.ctx, x);
        Ok(h(k, t) / (self.ctx.qpowf(k as f64 / 2.0) * w.sqrt()))
    }

    /// `(int |F|^2 w dx, int_q^1 ||(IF)(t)||^2 dt)`, both by Gauss-Legendre.
    pub fn isometry<F: Fn(f64) -> f64>(&self, f: &CompactFunction<F>, nodes: usize) -> (f64, f64) {
        let gl = GaussLegendre::new(nodes);
        let ctx = &self.ctx;
        let mut lhs = 0.0;
        for k in f.support.iter() {
            lhs += gl.integrate(ctx.qpow(k + 1), ctx.qpow(k), |x| {
                let v = (f.f)(x);
                v * v * self.w(x)
            });
        }
        let rhs = gl.integrate(ctx.q(), 1.0, |t| self.slice(f, t).values.norm_sq());
        (lhs, rhs)
    }

    fn fiber_scale(&self, t: f64) -> f64 {
        1.0 / (self.w(t) * triple_product_norm(&self.ctx, t)).sqrt()
    }

    /// `e_in(x) = f_i(t) s_n(x) / sqrt(w(t) theta(t))`.
    pub fn family(&self, i: usize, n: u32, x: f64) -> f64 {
        let (_, t) = q_interval(&self.ctx, x);
        self.basis.eval(&self.ctx, i, t) * self.fiber_scale(t) * orthonormal_sw(&self.ctx, n, x)
    }

    /// `int e_in e_jm w dx` over the context window, `(i, n)` flattened as
    /// `i * (nmax + 1) + n`.
    pub fn family_gram(&self, imax: usize, nmax: u32, nodes: usize) -> Vec<Vec<f64>> {
        let gl = GaussLegendre::new(nodes);
        let ctx = &self.ctx;
        let nn = nmax as usize + 1;
        let dim = (imax + 1) * nn;
        let mut g = alloc::vec![alloc::vec![0.0; dim]; dim];
        let mut vals = alloc::vec![0.0; dim];
        for k in ctx.window().iter() {
            for (x, wt) in gl.mapped(ctx.qpow(k + 1), ctx.qpow(k)) {
                let wx = self.w(x);
                if wx == 0.0 {
                    continue;
                }
                let (_, t) = q_interval(ctx, x);
                let scale = self.fiber_scale(t);
                for n in 0..nn {
                    let s = orthonormal_sw(ctx, n as u32, x) * scale;
                    for i in 0..=imax {
                        vals[i * nn + n] = self.basis.eval(ctx, i, t) * s;
                    }
                }
                for a in 0..dim {
                    for b in a..dim {
                        g[a][b] += wt * wx * vals[a] * vals[b];
                    }
                }
            }
        }
        #[allow(clippy::needless_range_loop)]
        for a in 0..dim {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        g
    }

    /// `F_in = <F, e_in>`, returned as `[i][n]`.
    pub fn discrete_coeffs<F: Fn(f64) -> f64>(
        &self,
        f: &CompactFunction<F>,
        imax: usize,
        nmax: u32,
        nodes: usize,
    ) -> Vec<Vec<f64>> {
        let gl = GaussLegendre::new(nodes);
        let ctx = &self.ctx;
        let mut out = alloc::vec![alloc::vec![0.0; nmax as usize + 1]; imax + 1];
        let lt_q = ctx.ln_q();
        for (t, wt) in gl.mapped(ctx.q(), 1.0) {
            let theta = triple_product_norm(ctx, t);
            let lw = self.ln_w(t);
            // sum_k F(tq^k) s_n(tq^k) t^k q^{k(k+1)/2} sqrt(w(t)/theta(t))
            let mut g = alloc::vec![0.0; nmax as usize + 1];
            for k in f.support.iter() {
                let fx = f.at(ctx, t, k);
                if fx == 0.0 {
                    continue;
                }
                let kf = k as f64;
                let m =
                    (kf * t.ln() + kf * (kf + 1.0) / 2.0 * lt_q + 0.5 * lw).exp() / theta.sqrt();
                let x = t * ctx.qpow(k);
                for (n, gn) in g.iter_mut().enumerate() {
                    *gn += fx * orthonormal_sw(ctx, n as u32, x) * m;
                }
            }
            for (i, row) in out.iter_mut().enumerate() {
                let fi = self.basis.eval(ctx, i, t) * wt;
                for (o, gn) in row.iter_mut().zip(&g) {
                    *o += fi * gn;
                }
            }
        }
        out
    }

    /// `(FF)(lambda)` as `(a, s)` with value `a e^s`.
    fn transform_scaled<F: Fn(f64) -> f64>(
        &self,
        f: &CompactFunction<F>,
        lam: f64,
    ) -> Result<(f64, f64)> {
        let ctx = &self.ctx;
        let (l, t) = lambda_bucket(ctx, lam);
        let ln_u = (-lam).ln();
        let mut terms: Vec<(f64, f64)> = Vec::new();
        for k in f.support.iter() {
            let fx = f.at(ctx, t, k);
            if fx == 0.0 {
                continue;
            }
            let j = k + l;
            let (s, lp) = lattice_phi_parts(ctx, l, t, k)?;
            let ln_mag = -(j as f64) * ln_u + binom2(j + 1) as f64 * ctx.ln_q() + lp;
            terms.push((fx * s, ln_mag));
        }
        Ok(combine(&terms))
    }

    /// `(FF)(lambda) = sum_j F(-q^j/lambda) (-lambda)^{-j} q^{j(j+1)/2} phi_lambda(-q^j/lambda)`.
    pub fn transform<F: Fn(f64) -> f64>(&self, f: &CompactFunction<F>, lam: f64) -> Result<f64> {
        if !(lam < 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be negative",
            });
        }
        let (a, s) = self.transform_scaled(f, lam)?;
        Ok(a * s.exp())
    }

    pub fn ln_nu(&self, lam: f64) -> f64 {
        ln_nu(&self.ctx, lam)
    }

    pub fn nu(&self, lam: f64) -> f64 {
        nu(&self.ctx, lam)
    }

    /// `(F^* g)(x)`: discrete part `sum g_in e_in(x)` plus
    /// `sum_{|j| <= jmax} g(-q^j/x) phi_{-q^j/x}(x) nu(-q^j/x)`.
    pub fn transform_adjoint<G: Fn(f64) -> f64>(
        &self,
        discrete: &[Vec<f64>],
        g: G,
        x: f64,
        jmax: i64,
    ) -> Result<f64> {
        let ctx = &self.ctx;
        let (k, t) = q_interval(ctx, x);
        let mut s = 0.0;
        for (i, row) in discrete.iter().enumerate() {
            for (n, c) in row.iter().enumerate() {
                s += c * self.family(i, n as u32, x);
            }
        }
        for j in -jmax..=jmax {
            let l = j - k;
            let lam = -ctx.qpow(l) / t;
            let gv = g(lam);
            if gv == 0.0 {
                continue;
            }
            let (ps, lp) = lattice_phi_parts(ctx, l, t, k)?;
            s += gv * ps * (lp + self.ln_nu(lam)).exp();
        }
        Ok(s)
    }

    /// `F^* F F (x)` with the same truncation on both sides; the continuous
    /// part stays in log form throughout.
    pub fn round_trip<F: Fn(f64) -> f64>(
        &self,
        f: &CompactFunction<F>,
        imax: usize,
        nmax: u32,
        jmax: i64,
        nodes: usize,
        xs: &[f64],
    ) -> Result<Vec<f64>> {
        let coeffs = self.discrete_coeffs(f, imax, nmax, nodes);
        let ctx = &self.ctx;
        xs.iter()
            .map(|&x| {
                let mut s = self.transform_adjoint(&coeffs, |_| 0.0, x, 0)?;
                let (k, t) = q_interval(ctx, x);
                for j in -jmax..=jmax {
                    let l = j - k;
                    let lam = -ctx.qpow(l) / t;
                    let (a, sc) = self.transform_scaled(f, lam)?;
                    if a == 0.0 {
                        continue;
                    }
                    let (ps, lp) = lattice_phi_parts(ctx, l, t, k)?;
                    s += a * ps * (sc + lp + self.ln_nu(lam)).exp();
                }
                Ok(s)
            })
            .collect()
    }

    /// Both sides of the Plancherel identity for compactly supported `F`, `G`.
    pub fn plancherel<F, G>(
        &self,
        f: &CompactFunction<F>,
        g: &CompactFunction<G>,
        trunc: Truncation,
    ) -> Result<PlancherelReport>
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        let ctx = &self.ctx;
        let gl = GaussLegendre::new(trunc.nodes);
        let lo = f.support.kmin.max(g.support.kmin);
        let hi = f.support.kmax.min(g.support.kmax);
        let mut lhs = 0.0;
        for k in lo..=hi {
            lhs += gl.integrate(ctx.qpow(k + 1), ctx.qpow(k), |x| {
                (f.f)(x) * (g.f)(x) * self.w(x)
            });
        }
        let cf = self.discrete_coeffs(f, trunc.imax, trunc.nmax, trunc.nodes);
        let cg = self.discrete_coeffs(g, trunc.imax, trunc.nmax, trunc.nodes);
        let rhs_discrete: f64 = cf
            .iter()
            .flatten()
            .zip(cg.iter().flatten())
            .map(|(a, b)| a * b)
            .sum();
        // lambda = -q^l / t, dlambda / lambda^2 = q^{-l} dt
        let mut rhs_continuous = 0.0;
        for l in -trunc.lmax..=trunc.lmax {
            for (t, wt) in gl.mapped(ctx.q(), 1.0) {
                let lam = -ctx.qpow(l) / t;
                let (a, sa) = self.transform_scaled(f, lam)?;
                let (b, sb) = self.transform_scaled(g, lam)?;
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let ln =
                    sa + sb + self.ln_nu(lam) + self.ln_w(t * ctx.qpow(-l)) - l as f64 * ctx.ln_q();
                rhs_continuous += wt * a * b * ln.exp();
            }
        }
        Ok(PlancherelReport {
            lhs,
            rhs_discrete,
            rhs_continuous,
            defect: (lhs - rhs_discrete - rhs_continuous).abs(),
            truncation: trunc,
        })
    }
}

fn combine(terms: &[(f64, f64)]) -> (f64, f64) {
    let m = terms
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return (0.0, 0.0);
    }
    (terms.iter().map(|&(a, s)| a * (s - m).exp()).sum(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    extern crate std;
    use crate::eigenfunctions::{check_eigen_residual, phi_z};

    fn setup() -> ContinuousSpectrum {
        let ctx = QContext::new(0.5).unwrap();
        ContinuousSpectrum::new(WeightDensity::product_c(&ctx, 1.0).unwrap())
    }

    fn indicator(k: i64) -> CompactFunction<fn(f64) -> f64> {
        CompactFunction::new(Window::new(k, k), |_| 1.0)
    }

    #[test]
    fn per_and_p_maps() {
        let ctx = QContext::new(0.5).unwrap();
        let f = |t: f64| t * t + 0.1;
        assert_eq!(per_map(&ctx, f, 0.7), f(0.7));
        assert!((per_map(&ctx, f, 0.35) - per_map(&ctx, f, 0.7)).abs() < 1e-15);
        assert_eq!(q_interval(&ctx, 0.3).0, 1);
        assert!((per_map(&ctx, f, 0.3) - f(0.6)).abs() < 1e-15);
        assert_eq!(q_interval(&ctx, 1.0), (0, 1.0));
        assert_eq!(q_interval(&ctx, 0.5).0, 1);
        assert_eq!(p_map(&ctx, f, 0.8), f(0.8));
        let one = |_: f64| 1.0;
        let (x, q) = (0.8, 0.5);
        assert!((p_map(&ctx, one, x * q) - x.sqrt() * p_map(&ctx, one, x)).abs() < 1e-15);
        let cs = setup();
        let x = 0.35;
        let (_, t) = q_interval(&ctx, x);
        let lhs = per_map(&ctx, |t| f(t) / cs.w(t).sqrt(), x);
        let rhs = p_map(&ctx, f, x) / cs.w(x).sqrt();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs(), "{t}");
    }

    #[test]
    fn slicing() {
        let cs = setup();
        let ctx = *cs.context();
        let v = cs.slice(&indicator(0), 0.7);
        assert_eq!(v.values.values().len(), 1);
        assert!((v.values.get(0) - cs.w(0.7).sqrt()).abs() < 1e-15);
        let step =
            CompactFunction::new(Window::new(0, 1), |x: f64| if x > 0.5 { 1.0 } else { -0.5 });
        let (a, b) = cs.isometry(&step, 64);
        assert!((a - b).abs() < 1e-8 * a);
        // q-periodic multiplier passes through
        let g = |t: f64| 1.0 + t * t;
        let gf = CompactFunction::new(step.support, |x: f64| per_map(&ctx, g, x) * (step.f)(x));
        let t = 0.8;
        let lhs = cs.slice(&gf, t);
        let rhs = cs.slice(&step, t);
        for k in 0..=1 {
            assert!((lhs.values.get(k) - g(t) * rhs.values.get(k)).abs() < 1e-14);
        }
        // I* I = id
        for x in [0.55, 0.7, 0.99, 0.3, 0.45] {
            let h = |k: i64, t: f64| cs.slice(&step, t).values.get(k);
            let back = cs.slice_adjoint(h, x).unwrap();
            assert!((back - step.eval(&ctx, x)).abs() < 1e-13, "x={x}");
        }
        // single mode lives on one q-interval
        let h = |k: i64, t: f64| if k == 2 { t } else { 0.0 };
        assert!(cs.slice_adjoint(h, 0.2).unwrap() != 0.0);
        assert_eq!(cs.slice_adjoint(h, 0.3).unwrap(), 0.0);
        let dead =
            ContinuousSpectrum::new(WeightDensity::custom(
                &ctx,
                |x| if x < 0.5 { 0.0 } else { 1.0 },
            ));
        assert!(matches!(
            dead.slice_adjoint(h, 0.2),
            Err(Error::ZeroWeight { .. })
        ));
    }

    #[test]
    fn orthonormal_polynomials() {
        let cs = setup();
        let ctx = *cs.context();
        assert_eq!(orthonormal_sw(&ctx, 0, 3.0), 1.0);
        for n in 0..=4 {
            for m in 0..=4 {
                let v = cs
                    .density()
                    .integrate(|x| orthonormal_sw(&ctx, n, x) * orthonormal_sw(&ctx, m, x));
                let target = if n == m { 1.0 } else { 0.0 };
                assert!((v - target).abs() < 1e-8, "n={n} m={m}: {v}");
                let mu = crate::measures::LatticeMeasure::new(&ctx, 0.7).unwrap();
                let v = mu
                    .sum(|_, x| orthonormal_sw(&ctx, n, x) * orthonormal_sw(&ctx, m, x))
                    .unwrap();
                assert!((v - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn family_is_orthonormal() {
        let cs = setup();
        let g = cs.family_gram(3, 3, 32);
        for (a, row) in g.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((v - target).abs() < 1e-7, "({a},{b}) = {v}");
            }
        }
    }

    #[test]
    fn transform_examples() {
        let cs = setup();
        let ctx = *cs.context();
        let zero = CompactFunction::new(Window::new(0, 0), |_: f64| 0.0);
        assert_eq!(cs.transform(&zero, -0.7).unwrap(), 0.0);
        let v = cs.transform(&indicator(0), -1.0).unwrap();
        let direct = phi_z(&ctx, -1.0, 1.0).unwrap();
        assert!((v - direct).abs() < 1e-13);
        // general lambda against the defining sum
        let g = CompactFunction::new(Window::new(-1, 2), |x: f64| x.sin());
        for lam in [-0.3, -0.6, -1.0, -2.5, -17.0] {
            let (l, t) = lambda_bucket(&ctx, lam);
            assert!((-ctx.qpow(l) / t - lam).abs() < 1e-14 * lam.abs());
            let mut direct = 0.0;
            for j in -12..=12 {
                let x = -ctx.qpow(j) / lam;
                let fx = g.eval(&ctx, x);
                direct += fx
                    * (-lam).powi(-j as i32)
                    * ctx.qpow(binom2(j + 1))
                    * phi_z(&ctx, lam, x).unwrap();
            }
            let v = cs.transform(&g, lam).unwrap();
            assert!(
                (v - direct).abs() < 1e-7 * (1.0 + direct.abs()),
                "{lam}: {v} vs {direct}"
            );
        }
        assert!(cs.transform(&indicator(0), 0.5).is_err());
    }

    #[test]
    fn nu_values() {
        let cs = setup();
        let ctx = *cs.context();
        let n0 = crate::spectral_discrete::norm_sq_neg(&ctx, 1.0, 0);
        assert!((cs.nu(-1.0) - 1.0 / n0).abs() < 1e-14);
        let lam = -0.6;
        let (l, t) = lambda_bucket(&ctx, lam);
        assert_eq!(l, 1);
        let direct = crate::spectral_discrete::norm_sq_direct(
            &ctx,
            t,
            crate::spectral_discrete::PointKind::Neg { r: l },
            ctx.window(),
        )
        .unwrap();
        assert!((cs.nu(lam) * direct * t - 1.0).abs() < 1e-9);
        for lam in [-1e-6, -0.01, -0.49, -0.5, -0.51, -7.0, -1e5] {
            let v = cs.nu(lam);
            assert!(v > 0.0 && v.is_finite(), "{lam}");
        }
    }

    #[test]
    fn eigen_residual_on_periodic_products() {
        let cs = setup();
        let ctx = *cs.context();
        for n in [0u32, 2] {
            let f = |x: f64| {
                Ok(per_map(&ctx, |t| LegendreBasis.eval(&ctx, 1, t), x)
                    * orthonormal_sw(&ctx, n, x))
            };
            for x in [0.3, 0.77, 1.9] {
                let r = check_eigen_residual(&ctx, f, ctx.qpow(n as i64), x).unwrap();
                assert!(r < 1e-8, "n={n} x={x}: {r}");
            }
        }
    }

    #[test]
    fn plancherel_indicator() {
        let cs = setup();
        let f = indicator(0);
        let r = cs.plancherel(&f, &f, Truncation::DEFAULT).unwrap();
        assert!((r.lhs - 0.23274).abs() < 1e-5);
        assert!(r.defect < 1e-3, "{r:?}");
        let r2 = cs
            .plancherel(&f, &f, Truncation::DEFAULT.doubled())
            .unwrap();
        assert!(r2.defect < r.defect, "{r2:?}");
    }

    #[test]
    fn round_trip_step() {
        let cs = setup();
        let ctx = *cs.context();
        let step =
            CompactFunction::new(Window::new(0, 1), |x: f64| if x > 0.5 { 1.0 } else { -0.5 });
        let xs = [0.26, 0.3, 0.37, 0.44, 0.49, 0.52, 0.6, 0.73, 0.88, 0.99];
        let mut last = f64::INFINITY;
        for nmax in [4, 8, 12, 20] {
            let back = cs.round_trip(&step, 8, nmax, 30, 64, &xs).unwrap();
            let err = xs
                .iter()
                .zip(&back)
                .map(|(&x, b)| (b - step.eval(&ctx, x)).abs())
                .fold(0.0, f64::max);
            assert!(err < last, "nmax={nmax}: {err}");
            last = err;
        }
        assert!(last < 1e-6, "{last}");
    }

    #[test]
    fn adjoint_basics() {
        let cs = setup();
        let ctx = *cs.context();
        let mut d = alloc::vec![alloc::vec![0.0; 3]; 2];
        d[0][0] = 1.0;
        for x in [0.3, 0.8, 2.2] {
            let v = cs.transform_adjoint(&d, |_| 0.0, x, 10).unwrap();
            let (_, t) = q_interval(&ctx, x);
            let expect = per_map(&ctx, |t| LegendreBasis.eval(&ctx, 0, t) / cs.w(t).sqrt(), x)
                / triple_product_norm(&ctx, t).sqrt();
            assert!((v - expect).abs() < 1e-14 * expect.abs());
            let g1 = |l: f64| (-l).ln().cos();
            let g2 = |l: f64| 1.0 / (1.0 + l * l);
            let a = cs.transform_adjoint(&d, g1, x, 10).unwrap();
            let b = cs.transform_adjoint(&d, g2, x, 10).unwrap();
            let c = cs
                .transform_adjoint(&d, |l| 2.0 * g1(l) - g2(l), x, 10)
                .unwrap();
            assert!((2.0 * a - b - c).abs() < 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn continuous_only_input_has_no_discrete_part() {
        let cs = setup();
        let bump = |l: f64| {
            let u = (-l).ln();
            if u.abs() < 1.0 {
                (1.0 - u * u).powi(3)
            } else {
                0.0
            }
        };
        let empty: Vec<Vec<f64>> = Vec::new();
        let csr = &cs;
        let f = CompactFunction::new(Window::new(-8, 8), move |x: f64| {
            csr.transform_adjoint(&empty, bump, x, 30).unwrap()
        });
        let c = cs.discrete_coeffs(&f, 4, 4, 32);
        let s: f64 = c.iter().flatten().map(|v| v * v).sum();
        let (norm, _) = cs.isometry(&f, 32);
        assert!(norm > 0.1);
        assert!(s < 1e-6, "{s}");
    }

    #[test]
    fn polynomial_input_has_no_continuous_part() {
        let cs = setup();
        let csr = &cs;
        let g = CompactFunction::new(Window::new(-14, 16), move |x: f64| csr.family(0, 2, x));
        let tr = Truncation {
            imax: 4,
            nmax: 4,
            lmax: 25,
            nodes: 32,
        };
        let r = cs.plancherel(&g, &g, tr).unwrap();
        assert!(r.rhs_continuous < 1e-6 * r.lhs, "{r:?}");
        assert!((r.rhs_discrete - r.lhs).abs() < 1e-6, "{r:?}");
    }
}
