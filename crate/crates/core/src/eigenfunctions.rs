//! Eigenfunctions of `Lf(x) = f(xq) - f(x)/x + f(x/q)/x`.
//!
//! * `phi_z(x) = 1phi1(1/z; 0; q, -xzq)`, entire in `x` and `z`
//! * `Phi_z(x) = x^{ln z / ln q} 1phi1(1/z; 0; q, -q/(xz))` for `z` off `(-inf, 0]`
//! * `S_n = phi_{q^n} / (q;q)_n`, the Stieltjes-Wigert polynomials
//! * `M_r^{(t)} = phi_{-q^r/t} / (q;q)_inf`, a lattice form of Jackson's second
//!   q-Bessel function

#[allow(unused_imports)] // shadowed by std when a dependency links it
use num_traits::Float;

use crate::qcore::{binom2, phi01, phi11, qbinomial, qpoch, qpoch_inf, QContext};
use crate::{Error, Result, Scalar, C64};

/// `phi_z(x)`; `z = 0` is the Rogers-Ramanujan limit `0phi1(-; 0; q, -xq)`.
pub fn phi_z<S: Scalar>(ctx: &QContext, z: S, x: S) -> Result<S> {
    if z.modulus() == 0.0 {
        return phi01(ctx, S::from_real(0.0), x.scale(-ctx.q()));
    }
    phi11(ctx, S::from_real(1.0) / z, -(x * z).scale(ctx.q()))
}

/// Principal-branch `Phi_z(x)` for `x > 0`.
pub fn phi_cap_z(ctx: &QContext, z: C64, x: f64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Branch);
    }
    let power = (z.ln() * (x.ln() / ctx.ln_q())).exp();
    let series = phi11(ctx, z.inv(), -C64::new(ctx.q(), 0.0) / (z * x))?;
    Ok(power * series)
}

/// `phi_0(x) = sum (-1)^n q^{n^2} x^n / (q;q)_n`, summed directly.
pub fn rogers_ramanujan<S: Scalar>(ctx: &QContext, x: S) -> Result<S> {
    let q = ctx.q();
    let mut term = S::from_real(1.0);
    let mut sum = term;
    let mut qn = 1.0;
    let mut small = 0;
    for _ in 0..ctx.max_terms() {
        // ratio: -q^{2n+1} x / (1 - q^{n+1})
        term = term * x.scale(-qn * qn * q / (1.0 - qn * q));
        sum = sum + term;
        if !sum.is_finite() {
            return Err(Error::Overflow);
        }
        if term.modulus() < ctx.tol() * (1.0 + sum.modulus()) {
            small += 1;
            if small == 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        qn *= q;
    }
    Err(Error::MaxTerms {
        terms: ctx.max_terms(),
    })
}

fn sw_coefficient(ctx: &QContext, n: u32, k: u32, qq_n: f64) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * qbinomial(ctx, n as i64, k as i64) * ctx.qpow((k * k) as i64) / qq_n
}

/// `S_n(x; q) = (1/(q;q)_n) sum_k [n,k]_q (-1)^k q^{k^2} x^k`.
pub fn sw_polynomial<S: Scalar>(ctx: &QContext, n: u32, x: S) -> S {
    let qq_n = qpoch(ctx, ctx.q(), n as i64).expect("(q;q)_n has no poles");
    let mut acc = S::from_real(0.0);
    for k in (0..=n).rev() {
        acc = acc * x + S::from_real(sw_coefficient(ctx, n, k, qq_n));
    }
    acc
}

/// `S_n(x) * exp(ln_scale)` for `x > 0`, summed term by term in log form so
/// that huge `x` paired with a tiny scale neither overflows nor underflows.
pub(crate) fn sw_polynomial_scaled(ctx: &QContext, n: u32, x: f64, ln_scale: f64) -> f64 {
    let qq_n = qpoch(ctx, ctx.q(), n as i64).expect("(q;q)_n has no poles");
    let lx = x.ln();
    let mut s = 0.0;
    for k in 0..=n {
        let c = sw_coefficient(ctx, n, k, qq_n);
        let mag = c.abs().ln() + k as f64 * lx + ln_scale;
        s += c.signum() * mag.exp();
    }
    s
}

/// `phi_{-q^r/t}(t q^k)` split as `(series, ln_prefactor)` with value
/// `series * exp(ln_prefactor)`.
///
/// With `j = r + k` the direct form is `1phi1(-t q^{-r}; 0; q, q^{1+j})`. For
/// `j < 0` that argument is large and the series cancels badly, so the
/// reflection
/// `1phi1(c; 0; q, q^{1+j}) = q^{rj} (-t)^{-j} 1phi1(c; 0; q, q^{1-j})`
/// is used instead.
pub(crate) fn lattice_phi_parts(ctx: &QContext, r: i64, t: f64, k: i64) -> Result<(f64, f64)> {
    let a = -t * ctx.qpow(-r);
    let j = r + k;
    if j >= 0 {
        Ok((phi11(ctx, a, ctx.qpow(1 + j))?, 0.0))
    } else {
        let series = phi11(ctx, a, ctx.qpow(1 - j))?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let ln_pref = (r * j) as f64 * ctx.ln_q() - j as f64 * t.ln();
        Ok((sign * series, ln_pref))
    }
}

/// `M_r^{(t)}(x) = phi_{-q^r/t}(x) / (q;q)_inf`.
pub fn qbessel_m(ctx: &QContext, r: i64, t: f64, x: f64) -> Result<f64> {
    let z = -ctx.qpow(r) / t;
    Ok(phi_z(ctx, z, x)? / qpoch_inf(ctx, ctx.q()))
}

/// `M_r^{(t)}(t q^k)` on the lattice, evaluated through [`lattice_phi_parts`].
pub fn qbessel_m_lattice(ctx: &QContext, r: i64, t: f64, k: i64) -> Result<f64> {
    let (s, lp) = lattice_phi_parts(ctx, r, t, k)?;
    Ok(s * lp.exp() / qpoch_inf(ctx, ctx.q()))
}

/// Jackson's `J_nu^{(2)}(z; q) = (z/2)^nu / (q;q)_inf * 1phi1(-z^2/4; 0; q, q^{nu+1})`.
pub fn jackson_j2(ctx: &QContext, nu: i64, zarg: f64) -> Result<f64> {
    let half = zarg / 2.0;
    let series = phi11(ctx, -half * half, ctx.qpow(nu + 1))?;
    Ok(half.powi(nu as i32) / qpoch_inf(ctx, ctx.q()) * series)
}

/// The `0phi1` form
/// `(q^{nu+1};q)_inf / (q;q)_inf (z/2)^nu 0phi1(-; q^{nu+1}; q, -z^2 q^{nu+1}/4)`.
/// Only valid for `nu >= 0`.
pub fn jackson_j2_phi01(ctx: &QContext, nu: i64, zarg: f64) -> Result<f64> {
    if nu < 0 {
        return Err(Error::InvalidParameter {
            name: "nu",
            reason: "the 0phi1 form needs nu >= 0",
        });
    }
    let half = zarg / 2.0;
    let b = ctx.qpow(nu + 1);
    let series = phi01(ctx, b, -half * half * b)?;
    Ok(qpoch_inf(ctx, b) / qpoch_inf(ctx, ctx.q()) * half.powi(nu as i32) * series)
}

/// `F_k` from `F_0 = 0`, `F_1 = 1`, `F_{k+1} = F_k - t q^{k-1} F_{k-1}`.
pub fn qfibonacci(ctx: &QContext, t: f64, k: u32) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = cur - t * ctx.qpow(j as i64 - 1) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed form `F_{k+1} = sum_{n<k} [k-n, n]_q (-1)^n q^{n^2} t^n`, returned
/// for index `k`.
pub fn qfibonacci_closed(ctx: &QContext, t: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let m = (k - 1) as i64;
    let mut s = 0.0;
    for n in 0..=m {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * qbinomial(ctx, m - n, n) * ctx.qpow(n * n) * t.powi(n as i32);
    }
    s
}

/// `(Lf)(x) = f(xq) - f(x)/x + f(x/q)/x`.
pub fn apply_l<S, F>(ctx: &QContext, f: F, x: f64) -> Result<S>
where
    S: Scalar,
    F: Fn(f64) -> Result<S>,
{
    let q = ctx.q();
    Ok(f(x * q)? - f(x)?.scale(1.0 / x) + f(x / q)?.scale(1.0 / x))
}

/// `|(Lf)(x) - z f(x)|`.
pub fn check_eigen_residual<S, F>(ctx: &QContext, f: F, z: S, x: f64) -> Result<f64>
where
    S: Scalar,
    F: Fn(f64) -> Result<S>,
{
    let fx = f(x)?;
    Ok((apply_l(ctx, &f, x)? - z * fx).modulus())
}

/// Residual of
/// `(-c)^{m+k} 1phi1(-c q^{-m}; 0; q, q^{1+m+k}) = q^{m(m+k)} 1phi1(-c q^{-m}; 0; q, q^{1-m-k})`.
pub fn proportionality_check(ctx: &QContext, c: C64, m: i64, k: i64) -> Result<f64> {
    let a = -c * ctx.qpow(-m);
    let lhs = (-c).powi((m + k) as i32) * phi11(ctx, a, C64::new(ctx.qpow(1 + m + k), 0.0))?;
    let rhs = phi11(ctx, a, C64::new(ctx.qpow(1 - m - k), 0.0))? * ctx.qpow(m * (m + k));
    Ok((lhs - rhs).norm())
}

/// Residual of the limit form of Heine's transformation applied to the
/// `Phi_z` series:
/// `1phi1(1/z; 0; q, -q/(xz)) = (-q/(xz);q)_inf 0phi1(-; -q/(xz); q, -q/(x z^2))`.
pub fn heine_residual(ctx: &QContext, z: C64, x: f64) -> Result<f64> {
    let y = -C64::new(ctx.q(), 0.0) / (z * x);
    let lhs = phi11(ctx, z.inv(), y)?;
    let rhs = qpoch_inf(ctx, y) * phi01(ctx, y, y / z)?;
    Ok((lhs - rhs).norm())
}

/// `0phi1(-; -zq/x; q, -z^2 q/x)`, which tends to `(z;q)_inf` as `x -> 0`.
pub fn lemma_x0_series(ctx: &QContext, z: C64, x: f64) -> Result<C64> {
    let b = -z * (ctx.q() / x);
    phi01(ctx, b, b * z)
}

/// `|0phi1(-; -zq/x; q, -z^2 q/x) - (z;q)_inf|`.
pub fn lemma_x0_error(ctx: &QContext, z: C64, x: f64) -> Result<f64> {
    Ok((lemma_x0_series(ctx, z, x)? - qpoch_inf(ctx, z)).norm())
}

/// Residual of `-a y f(yq) + (y - q) f(y) + q f(y/q) = 0` for `f = 1phi1(a; 0; q, .)`.
pub fn difference_equation_residual<S: Scalar>(ctx: &QContext, a: S, y: S) -> Result<f64> {
    let q = ctx.q();
    let f = |u: S| phi11(ctx, a, u);
    let r =
        -(a * y) * f(y.scale(q))? + (y - S::from_real(q)) * f(y)? + f(y.scale(1.0 / q))?.scale(q);
    Ok(r.modulus())
}

/// Residual of
/// `(-q^{1-n}/(tz);q)_inf = (-tz;q)_n (-q/(tz);q)_inf / ((tz)^n q^{n(n-1)/2})`.
pub fn inf_prod_residual(ctx: &QContext, t: f64, z: C64, n: i64) -> Result<f64> {
    let tz = z * t;
    let lhs = qpoch_inf(ctx, -C64::new(ctx.qpow(1 - n), 0.0) / tz);
    let rhs = qpoch(ctx, -tz, n)? * qpoch_inf(ctx, -C64::new(ctx.q(), 0.0) / tz)
        / (tz.powi(n as i32) * ctx.qpow(binom2(n)));
    Ok((lhs - rhs).norm())
}

/// Which eigenfunction family to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenfunctionKind {
    PhiZ,
    PhiCapZ,
    Phi0,
    SwPoly { n: u32 },
    QBesselM { r: i64, t: f64 },
}

/// An eigenfunction of `L` together with its eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenfunctionSpec {
    pub kind: EigenfunctionKind,
    pub z: C64,
}

impl EigenfunctionSpec {
    pub fn phi(z: C64) -> Self {
        EigenfunctionSpec {
            kind: EigenfunctionKind::PhiZ,
            z,
        }
    }

    pub fn phi_cap(z: C64) -> Result<Self> {
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::Branch);
        }
        Ok(EigenfunctionSpec {
            kind: EigenfunctionKind::PhiCapZ,
            z,
        })
    }

    pub fn phi0() -> Self {
        EigenfunctionSpec {
            kind: EigenfunctionKind::Phi0,
            z: C64::new(0.0, 0.0),
        }
    }

    pub fn sw(ctx: &QContext, n: u32) -> Self {
        EigenfunctionSpec {
            kind: EigenfunctionKind::SwPoly { n },
            z: C64::new(ctx.qpow(n as i64), 0.0),
        }
    }

    pub fn qbessel(ctx: &QContext, r: i64, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: "must be positive",
            });
        }
        Ok(EigenfunctionSpec {
            kind: EigenfunctionKind::QBesselM { r, t },
            z: C64::new(-ctx.qpow(r) / t, 0.0),
        })
    }

    /// Value at `x > 0`.
    pub fn eval(&self, ctx: &QContext, x: f64) -> Result<C64> {
        match self.kind {
            EigenfunctionKind::PhiZ => phi_z(ctx, self.z, C64::new(x, 0.0)),
            EigenfunctionKind::PhiCapZ => phi_cap_z(ctx, self.z, x),
            EigenfunctionKind::Phi0 => rogers_ramanujan(ctx, C64::new(x, 0.0)),
            EigenfunctionKind::SwPoly { n } => Ok(sw_polynomial(ctx, n, C64::new(x, 0.0))),
            EigenfunctionKind::QBesselM { r, t } => Ok(C64::new(qbessel_m(ctx, r, t, x)?, 0.0)),
        }
    }

    /// `|(L f)(x) - z f(x)|`.
    pub fn residual(&self, ctx: &QContext, x: f64) -> Result<f64> {
        check_eigen_residual(ctx, |u| self.eval(ctx, u), self.z, x)
    }
}
