//! Generic real scalar used by the formula layer.
//!
//! All closed-form quantities (asymptotic bounds, kernel integrals,
//! theorem constants) are written once against [`Real`] and instantiated
//! at `f64` for speed or at [`crate::Dd`] where the construction demands
//! extended precision. Cross-checking the two instantiations against each
//! other is itself a useful test of cancellation behaviour.

use crate::dd::Dd;
use num_traits::Num;
use std::fmt::{Debug, Display};
use std::ops::Neg;

pub trait Real: Num + Neg<Output = Self> + PartialOrd + Copy + Debug + Display {
    /// Significant decimal digits carried by the format.
    const DIGITS10: u32;

    fn from_f64(x: f64) -> Self;
    fn from_u64(x: u64) -> Self;
    fn from_i64(x: i64) -> Self;
    fn to_f64(self) -> f64;

    fn pi() -> Self;
    fn two_pi() -> Self;
    fn euler_e() -> Self;
    fn ln_sqrt_2pi() -> Self;

    fn abs(self) -> Self;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn powi(self, n: i64) -> Self;
    fn powf(self, e: Self) -> Self;
    fn recip(self) -> Self;
    fn is_finite(self) -> bool;

    fn max_of(self, other: Self) -> Self {
        if self < other {
            other
        } else {
            self
        }
    }
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_real_float {
    ($t:ty, $digits:expr) => {
        impl Real for $t {
            const DIGITS10: u32 = $digits;

            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn from_u64(x: u64) -> Self {
                x as $t
            }
            #[inline]
            fn from_i64(x: i64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn pi() -> Self {
                std::f64::consts::PI as $t
            }
            #[inline]
            fn two_pi() -> Self {
                std::f64::consts::TAU as $t
            }
            #[inline]
            fn euler_e() -> Self {
                std::f64::consts::E as $t
            }
            #[inline]
            fn ln_sqrt_2pi() -> Self {
                0.9189385332046727_f64 as $t
            }

            #[inline]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline]
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            #[inline]
            fn ceil(self) -> Self {
                <$t>::ceil(self)
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            #[inline]
            fn ln_1p(self) -> Self {
                <$t>::ln_1p(self)
            }
            #[inline]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn sin_cos(self) -> (Self, Self) {
                <$t>::sin_cos(self)
            }
            #[inline]
            fn powi(self, n: i64) -> Self {
                <$t>::powi(self, n as i32)
            }
            #[inline]
            fn powf(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
            #[inline]
            fn recip(self) -> Self {
                <$t>::recip(self)
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

impl_real_float!(f32, 6);
impl_real_float!(f64, 15);

impl Real for Dd {
    const DIGITS10: u32 = 31;

    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    #[inline]
    fn from_u64(x: u64) -> Self {
        Dd::from_u64(x)
    }
    #[inline]
    fn from_i64(x: i64) -> Self {
        Dd::from_i64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }

    #[inline]
    fn pi() -> Self {
        Dd::PI
    }
    #[inline]
    fn two_pi() -> Self {
        Dd::TWO_PI
    }
    #[inline]
    fn euler_e() -> Self {
        Dd::E
    }
    #[inline]
    fn ln_sqrt_2pi() -> Self {
        Dd::LN_SQRT_2PI
    }

    #[inline]
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    #[inline]
    fn floor(self) -> Self {
        Dd::floor(self)
    }
    #[inline]
    fn ceil(self) -> Self {
        Dd::ceil(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    #[inline]
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        Dd::ln_1p(self)
    }
    #[inline]
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    #[inline]
    fn sin(self) -> Self {
        Dd::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        Dd::cos(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        Dd::sin_cos(self)
    }
    #[inline]
    fn powi(self, n: i64) -> Self {
        Dd::powi(self, n)
    }
    #[inline]
    fn powf(self, e: Self) -> Self {
        Dd::powf(self, e)
    }
    #[inline]
    fn recip(self) -> Self {
        Dd::recip(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
}

/// Neumaier-compensated streaming accumulator with a fixed consumption
/// order, so that identical inputs always produce identical sums.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<R: Real> {
    sum: R,
    compensation: R,
}

impl<R: Real> Default for CompensatedSum<R> {
    fn default() -> Self {
        CompensatedSum {
            sum: R::zero(),
            compensation: R::zero(),
        }
    }
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    /// Merge a partial sum produced by another accumulator. Merging must
    /// happen in a fixed order for deterministic parallel reductions.
    pub fn merge(&mut self, other: &CompensatedSum<R>) {
        self.add(other.sum);
        self.compensation = self.compensation + other.compensation;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum + self.compensation
    }
}

const PAIRWISE_LEAF: usize = 32;

/// Pairwise (tree) reduction; error grows like `O(eps log n)`.
pub fn pairwise_sum<R: Real>(xs: &[R]) -> R {
    if xs.len() <= PAIRWISE_LEAF {
        let mut acc = CompensatedSum::new();
        for &x in xs {
            acc.add(x);
        }
        return acc.value();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
