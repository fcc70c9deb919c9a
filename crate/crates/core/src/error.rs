use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A parameter violates its documented domain.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A vanishing factor in a denominator (negative-index Pochhammer or a
    /// `0phi1` lower parameter).
    Pole { index: i64 },
    /// Series did not meet the stopping rule within `max_terms`.
    MaxTerms { terms: usize },
    /// Partial sums left the floating point range.
    Overflow,
    /// `Phi_z` requested for `z` on `(-inf, 0]`.
    Branch,
    /// `Psi(z)` requested at `z = 0`.
    ZeroSpectralParam,
    /// A boundary term of a bilateral sum is not negligible.
    Window { kmin: i64, kmax: i64 },
    /// The Wronskian is numerically zero, so `z` sits on the spectrum.
    SpectralPoint { wronskian: f64 },
    /// Berg measures need `t < q^r`.
    Domain { reason: &'static str },
    /// The weight vanishes where its reciprocal square root is needed.
    ZeroWeight { x: f64 },
    /// The tridiagonal eigensolver failed to converge.
    NoConvergence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::Pole { index } => write!(f, "vanishing denominator factor at index {index}"),
            Error::MaxTerms { terms } => write!(f, "series not converged after {terms} terms"),
            Error::Overflow => f.write_str("series partial sum overflowed"),
            Error::Branch => f.write_str("spectral parameter lies on the branch cut (-inf, 0]"),
            Error::ZeroSpectralParam => f.write_str("spectral parameter must be nonzero"),
            Error::Window { kmin, kmax } => write!(
                f,
                "window [{kmin}, {kmax}] too narrow: boundary terms exceed tolerance"
            ),
            Error::SpectralPoint { wronskian } => write!(
                f,
                "spectral parameter is on the spectrum (|W| = {wronskian:e})"
            ),
            Error::Domain { reason } => write!(f, "domain error: {reason}"),
            Error::ZeroWeight { x } => write!(f, "weight vanishes at x = {x:e}"),
            Error::NoConvergence => f.write_str("tridiagonal eigensolver did not converge"),
        }
    }
}

impl core::error::Error for Error {}
