//! Numerical laboratory for the resonance method on vertical lines of the
//! critical strip.
//!
//! The library builds multiplicative resonator sets from the first `M`
//! primes, selects bucket representatives separated in ratio, evaluates
//! Gál-type GCD sums, decomposes weighted resonance integrals by frequency
//! type, evaluates `zeta(alpha + it)` by truncated Dirichlet polynomials
//! against a high-accuracy Euler–Maclaurin oracle, and turns the resulting
//! machinery into extreme-value searches and level-set measure estimates.
//! All asymptotic inequalities the argument rests on are exposed as
//! numerically checkable operations.
//!
//! Numeric policy:
//! * equality of integer products is decided by exact big-integer
//!   arithmetic, never by floating point;
//! * logarithms and phases are carried in double-double ([`Dd`]) precision
//!   (31+ significant digits);
//! * formula evaluation is generic over [`Real`], so every closed form can
//!   be instantiated at both `f64` and [`Dd`] and the two compared.

pub mod asymptotics;
pub mod caps;
pub mod construction;
pub mod dd;
pub mod error;
pub mod gcd_sums;
pub mod primes;
pub mod quadrature;
pub mod resonance;
pub mod scalar;
pub mod search;
pub mod zeta;

pub use caps::ResourceCaps;
pub use dd::Dd;
pub use error::{Error, Result};
pub use scalar::{pairwise_sum, CompensatedSum, Real};

/// The weighted integration kernel at working precision.
pub type Kernel = resonance::WeightedKernel<f64>;
/// The weighted integration kernel at extended precision.
pub type KernelX = resonance::WeightedKernel<Dd>;

/// Format a float as a decimal string with 17 significant digits, the
/// canonical exchange format for report files.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}
