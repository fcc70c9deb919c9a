//! q-Pochhammer symbols, q-binomials and the `1phi1` / `0phi1` series.
//!
//! Conventions follow Gasper and Rahman:
//!
//! * `(a;q)_n = prod_{k<n} (1 - a q^k)`, and `(a;q)_{-n} = 1 / (a q^{-n};q)_n`
//! * `1phi1(a;0;q,y) = sum (a;q)_n/(q;q)_n (-1)^n q^{n(n-1)/2} y^n`
//! * `0phi1(-;b;q,z) = sum q^{n(n-1)} z^n / ((q;q)_n (b;q)_n)`

use core::ops::RangeInclusive;

#[allow(unused_imports)] // shadowed by std when a dependency links it
use num_traits::Float;

use crate::{Error, Result, Scalar};

/// Inclusive integer index range `[kmin, kmax]` for bilateral sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub kmin: i64,
    pub kmax: i64,
}

impl Window {
    pub const fn new(kmin: i64, kmax: i64) -> Self {
        Window { kmin, kmax }
    }

    /// `[-k, k]`
    pub const fn symmetric(k: i64) -> Self {
        Window { kmin: -k, kmax: k }
    }

    pub fn len(&self) -> usize {
        if self.kmax < self.kmin {
            0
        } else {
            (self.kmax - self.kmin + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kmax < self.kmin
    }

    pub fn iter(&self) -> RangeInclusive<i64> {
        self.kmin..=self.kmax
    }

    pub fn contains(&self, k: i64) -> bool {
        self.kmin <= k && k <= self.kmax
    }
}

/// The base `q` and the numeric policy shared by every computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QContext {
    q: f64,
    ln_q: f64,
    tol: f64,
    max_terms: usize,
    window: Window,
}

impl QContext {
    pub const DEFAULT_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_TERMS: usize = 500;
    pub const DEFAULT_WINDOW: Window = Window::new(-80, 80);

    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: "must lie in (0, 1)",
            });
        }
        Ok(QContext {
            q,
            ln_q: q.ln(),
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
            window: Self::DEFAULT_WINDOW,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: "must be positive and finite",
            });
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParameter {
                name: "max_terms",
                reason: "must be at least 1",
            });
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn with_window(mut self, window: Window) -> Result<Self> {
        if !(window.kmin < 0 && window.kmax > 0) {
            return Err(Error::InvalidParameter {
                name: "window",
                reason: "need kmin < 0 < kmax",
            });
        }
        self.window = window;
        Ok(self)
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn ln_q(&self) -> f64 {
        self.ln_q
    }

    #[inline]
    pub fn tol(&self) -> f64 {
        self.tol
    }

    #[inline]
    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    #[inline]
    pub fn window(&self) -> Window {
        self.window
    }

    /// `q^n` for any integer `n`.
    #[inline]
    pub fn qpow(&self, n: i64) -> f64 {
        if n.unsigned_abs() < i32::MAX as u64 {
            self.q.powi(n as i32)
        } else {
            (n as f64 * self.ln_q).exp()
        }
    }

    /// `q^x` for real `x`.
    #[inline]
    pub fn qpowf(&self, x: f64) -> f64 {
        (x * self.ln_q).exp()
    }
}

/// `n(n-1)/2`, valid for every integer `n`.
#[inline]
pub const fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

fn pole_guard(factor: f64, scale: f64) -> bool {
    factor <= 8.0 * f64::EPSILON * (1.0 + scale)
}

/// `(a;q)_n` for any integer `n`, negative `n` through the reciprocal rule.
pub fn qpoch<S: Scalar>(ctx: &QContext, a: S, n: i64) -> Result<S> {
    let one = S::from_real(1.0);
    if n >= 0 {
        let mut p = one;
        let mut qk = 1.0;
        for _ in 0..n {
            p = p * (one - a.scale(qk));
            qk *= ctx.q;
        }
        Ok(p)
    } else {
        // (a;q)_{-m} = 1 / prod_{j=1}^{m} (1 - a q^{-j})
        let mut p = one;
        for j in 1..=(-n) {
            let aq = a.scale(ctx.qpow(-j));
            let f = one - aq;
            if pole_guard(f.modulus(), aq.modulus()) {
                return Err(Error::Pole { index: -j });
            }
            p = p * f;
        }
        Ok(one / p)
    }
}

/// `(a;q)_inf`. Stops once the remaining factors multiply to `1` within
/// `tol`, i.e. after `|a q^k| <= tol (1 - q)`.
pub fn qpoch_inf<S: Scalar>(ctx: &QContext, a: S) -> S {
    let one = S::from_real(1.0);
    let am = a.modulus();
    if am == 0.0 {
        return one;
    }
    let stop = ctx.tol * (1.0 - ctx.q);
    let mut p = one;
    let mut qk = 1.0;
    loop {
        let f = a.scale(qk);
        p = p * (one - f);
        if am * qk <= stop || p.modulus() == 0.0 {
            return p;
        }
        qk *= ctx.q;
    }
}

/// Product of several infinite Pochhammer symbols `(a_1, ..., a_m; q)_inf`.
pub fn qpoch_inf_many<S: Scalar>(ctx: &QContext, args: &[S]) -> S {
    args.iter()
        .fold(S::from_real(1.0), |acc, &a| acc * qpoch_inf(ctx, a))
}

/// `ln (-a;q)_inf` for `a >= 0`; no overflow for huge `a`.
pub fn ln_qpoch_inf_neg(ctx: &QContext, a: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let stop = ctx.tol * (1.0 - ctx.q);
    let mut s = 0.0;
    let mut qk = 1.0;
    loop {
        let f = a * qk;
        s += f.ln_1p();
        if f <= stop {
            return s;
        }
        qk *= ctx.q;
    }
}

/// Gaussian binomial `[n, k]_q`; zero outside `0 <= k <= n`.
pub fn qbinomial(ctx: &QContext, n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut v = 1.0;
    for j in 1..=k {
        v *= (1.0 - ctx.qpow(n - k + j)) / (1.0 - ctx.qpow(j));
    }
    v
}

struct Stopper {
    tol: f64,
    small: u8,
}

impl Stopper {
    fn new(tol: f64) -> Self {
        Stopper { tol, small: 0 }
    }

    /// True once two consecutive terms are negligible.
    fn done<S: Scalar>(&mut self, term: S, sum: S) -> bool {
        if term.modulus() < self.tol * (1.0 + sum.modulus()) {
            self.small += 1;
        } else {
            self.small = 0;
        }
        self.small >= 2
    }
}

/// `1phi1(a; 0; q, y)`.
pub fn phi11<S: Scalar>(ctx: &QContext, a: S, y: S) -> Result<S> {
    let one = S::from_real(1.0);
    let mut term = one;
    let mut sum = one;
    let mut qn = 1.0;
    let mut stop = Stopper::new(ctx.tol);
    for _ in 0..ctx.max_terms {
        term = term * (one - a.scale(qn)) * y.scale(-qn / (1.0 - qn * ctx.q));
        sum = sum + term;
        if !sum.is_finite() {
            return Err(Error::Overflow);
        }
        if stop.done(term, sum) {
            return Ok(sum);
        }
        qn *= ctx.q;
    }
    Err(Error::MaxTerms {
        terms: ctx.max_terms,
    })
}

/// `0phi1(-; b; q, z)`.
pub fn phi01<S: Scalar>(ctx: &QContext, b: S, z: S) -> Result<S> {
    let one = S::from_real(1.0);
    let mut term = one;
    let mut sum = one;
    let mut qn = 1.0;
    let mut stop = Stopper::new(ctx.tol);
    for n in 0..ctx.max_terms {
        let bq = b.scale(qn);
        let lower = one - bq;
        if pole_guard(lower.modulus(), bq.modulus()) {
            return Err(Error::Pole { index: n as i64 });
        }
        term = term * z.scale(qn * qn / (1.0 - qn * ctx.q)) / lower;
        sum = sum + term;
        if !sum.is_finite() {
            return Err(Error::Overflow);
        }
        if stop.done(term, sum) {
            return Ok(sum);
        }
        qn *= ctx.q;
    }
    Err(Error::MaxTerms {
        terms: ctx.max_terms,
    })
}

/// `(-tq, -1/t, q; q)_inf`, the total mass of `sum_k t^k q^{k(k+1)/2}`.
pub fn triple_product_norm(ctx: &QContext, t: f64) -> f64 {
    qpoch_inf_many(ctx, &[-t * ctx.q, -1.0 / t, ctx.q])
}

/// `ln` of [`triple_product_norm`], safe for extreme `t`.
pub fn ln_triple_product_norm(ctx: &QContext, t: f64) -> f64 {
    ln_qpoch_inf_neg(ctx, t * ctx.q) + ln_qpoch_inf_neg(ctx, 1.0 / t) + qpoch_inf(ctx, ctx.q).ln()
}
