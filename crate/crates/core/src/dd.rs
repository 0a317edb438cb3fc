//! Double-double arithmetic: an unevaluated sum of two `f64`s giving
//! roughly 31-32 significant decimal digits.
//!
//! Every ratio and phase decision in the resonator construction lives or
//! dies on logarithms of integers that are extremely close to each other,
//! so plain `f64` is not an option. A double-double carries enough
//! precision for the `1e-25` log contract while staying a flat, copyable
//! 16-byte value. Argument reduction for `sin`/`cos`/`exp` subtracts
//! multiples of three-limb constants so that reduced arguments stay
//! accurate even for inputs of order `1e9`.

use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

/// Double-double number. Invariant: `hi = fl(hi + lo)` and `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

/// Three-limb constant used for exact-ish argument reduction.
#[derive(Clone, Copy)]
struct Triple {
    c0: f64,
    c1: f64,
    c2: f64,
}

const TWO_PI_T: Triple = Triple {
    c0: 6.283185307179586,
    c1: 2.4492935982947064e-16,
    c2: -5.989539619436679e-33,
};
const PI_2_T: Triple = Triple {
    c0: 1.5707963267948966,
    c1: 6.123233995736766e-17,
    c2: -1.4973849048591698e-33,
};
const LN_2_T: Triple = Triple {
    c0: 0.6931471805599453,
    c1: 2.3190468138462996e-17,
    c2: 5.707708438416212e-34,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    pub const FRAC_PI_2: Dd = Dd {
        hi: 1.5707963267948966,
        lo: 6.123233995736766e-17,
    };
    pub const LN_2: Dd = Dd {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };
    pub const E: Dd = Dd {
        hi: 2.718281828459045,
        lo: 1.4456468917292502e-16,
    };
    /// log(sqrt(2*pi)), used by Stirling-type formulas.
    pub const LN_SQRT_2PI: Dd = Dd {
        hi: 0.9189385332046728,
        lo: -3.8782941580672414e-17,
    };
    /// Roughly the relative rounding unit of the format (2^-104).
    pub const EPSILON: f64 = 4.93e-32;

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_u64(x: u64) -> Dd {
        let hi = x as f64;
        // hi rounds x to 53 bits; the residual always fits exactly.
        let lo = if hi >= 9.007199254740992e15 {
            (x as i128 - hi as i128) as f64
        } else {
            0.0
        };
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn from_u128(x: u128) -> Dd {
        let hi = x as f64;
        let lo = if hi >= 9.007199254740992e15 && hi <= 1.7e38 {
            let hi_int = hi as u128;
            if hi_int >= x {
                -((hi_int - x) as f64)
            } else {
                (x - hi_int) as f64
            }
        } else {
            0.0
        };
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn from_i64(x: i64) -> Dd {
        if x < 0 {
            -Dd::from_u64(x.unsigned_abs())
        } else {
            Dd::from_u64(x as u64)
        }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn floor(self) -> Dd {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (h, l) = quick_two_sum(fh, self.lo.floor());
            Dd { hi: h, lo: l }
        } else {
            Dd { hi: fh, lo: 0.0 }
        }
    }

    pub fn ceil(self) -> Dd {
        -((-self).floor())
    }

    pub fn round(self) -> Dd {
        (self + Dd::from_f64(0.5)).floor()
    }

    pub fn trunc(self) -> Dd {
        if self.hi < 0.0 {
            self.ceil()
        } else {
            self.floor()
        }
    }

    /// Floor of a non-negative value as `u128`. `None` when negative,
    /// non-finite, or too large.
    pub fn to_u128_floor(self) -> Option<u128> {
        let f = self.floor();
        if !f.is_finite() || f.hi < 0.0 || f.hi >= 1.7e38 {
            return None;
        }
        let base = f.hi as i128;
        let adj = f.lo as i128;
        let v = base.checked_add(adj)?;
        if v < 0 {
            return None;
        }
        Some(v as u128)
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::new(f64::NAN, f64::NAN);
        }
        let y = Dd::from_f64(self.hi.sqrt());
        // two Newton steps: y += (x - y^2) / (2 y)
        let y = y + (self - y * y) / (y + y);
        y + (self - y * y) / (y + y)
    }

    /// Natural exponential. Reduction `x = k ln2 + r`, `|r| <= ln2/2`,
    /// then a Taylor series in `r` and exact scaling by `2^k`.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN_2_T.c0).round();
        let r = reduce_by(self, k, LN_2_T);
        // exp(r) = sum r^n / n!
        let mut sum = Dd::ONE + r;
        let mut term = r;
        let mut n = 2u64;
        loop {
            term = term * r / Dd::from_u64(n);
            sum += term;
            if term.hi.abs() <= 1.0e-35 * sum.hi.abs() || n > 40 {
                break;
            }
            n += 1;
        }
        sum.scale_pow2(k as i32)
    }

    fn scale_pow2(self, k: i32) -> Dd {
        // |k| stays below ~1100 for finite results; split to avoid
        // overflow of the intermediate 2^k.
        let half = k / 2;
        let rest = k - half;
        let s1 = pow2(half);
        let s2 = pow2(rest);
        Dd {
            hi: self.hi * s1 * s2,
            lo: self.lo * s1 * s2,
        }
    }

    /// Natural logarithm via Newton iteration on `exp(y) = x`.
    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN, f64::NAN);
        }
        let mut y = Dd::from_f64(self.hi.ln());
        // two steps square the accuracy of the f64 seed twice over
        y = y + self * (-y).exp() - Dd::ONE;
        y = y + self * (-y).exp() - Dd::ONE;
        y
    }

    /// log(1 + u), accurate for tiny `u`.
    pub fn ln_1p(self) -> Dd {
        let u = self;
        if u.hi.abs() >= 0.1 {
            return (Dd::ONE + u).ln();
        }
        if u.hi == 0.0 && u.lo == 0.0 {
            return Dd::ZERO;
        }
        // alternating series sum (-1)^(k+1) u^k / k
        let mut sum = u;
        let mut pow = u;
        let mut k = 2u64;
        loop {
            pow = pow * u;
            let term = pow / Dd::from_u64(k);
            if k % 2 == 0 {
                sum -= term;
            } else {
                sum += term;
            }
            if term.hi.abs() <= 1.0e-35 * sum.hi.abs() || k > 60 {
                break;
            }
            k += 1;
        }
        sum
    }

    /// Reduce modulo 2*pi into roughly `[-pi, pi]`.
    pub fn reduce_two_pi(self) -> Dd {
        let k = (self.hi / TWO_PI_T.c0).round();
        if k == 0.0 {
            return self;
        }
        reduce_by(self, k, TWO_PI_T)
    }

    /// Simultaneous sine and cosine at full double-double accuracy.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let r = self.reduce_two_pi();
        let q = (r.hi / PI_2_T.c0).round();
        let r2 = reduce_by(r, q, PI_2_T);
        let (s, c) = taylor_sin_cos(r2);
        match (q as i32).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }

    /// Fast path for unit phasors: reduction modulo 2*pi accurate to
    /// ~1e-16 absolute in the reduced argument, then `f64` trigonometry.
    /// Keeps full phase fidelity for arguments up to ~1e9 while staying a
    /// handful of flops (the third constant limb is below f64 relevance
    /// and is dropped).
    #[inline]
    pub fn sin_cos_f64(self) -> (f64, f64) {
        const INV_2PI: f64 = 0.15915494309189535;
        let k = (self.hi * INV_2PI).round();
        if k == 0.0 {
            return (self.hi + self.lo).sin_cos();
        }
        let (p0h, p0l) = two_prod(k, TWO_PI_T.c0);
        let (s, e) = two_sum(self.hi, -p0h);
        let r = s + (e + ((self.lo - p0l) - k * TWO_PI_T.c1));
        r.sin_cos()
    }

    pub fn powi(self, n: i64) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn powf(self, e: Dd) -> Dd {
        (e * self.ln()).exp()
    }

    pub fn max(self, other: Dd) -> Dd {
        if self < other {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Dd) -> Dd {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Decimal representation with `digits` significant digits
    /// (scientific form, round-trippable by [`Dd::from_decimal_str`]).
    pub fn to_decimal_string(self, digits: usize) -> String {
        if self.is_nan() {
            return "nan".to_string();
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return "0".to_string();
        }
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut e10 = x.hi.abs().log10().floor() as i32;
        let ten = Dd::from_u64(10);
        x = x / ten.powi(e10 as i64);
        // correct the scaling if log10 was off by one
        if x.hi >= 10.0 {
            x = x / ten;
            e10 += 1;
        } else if x.hi < 1.0 {
            x = x * ten;
            e10 -= 1;
        }
        let mut mantissa = String::with_capacity(digits + 2);
        for i in 0..digits {
            let d = x.floor().to_f64() as i64;
            let d = d.clamp(0, 9);
            mantissa.push(char::from(b'0' + d as u8));
            if i == 0 {
                mantissa.push('.');
            }
            x = (x - Dd::from_i64(d)) * ten;
        }
        format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, e10)
    }

    /// Parse a decimal string (`[-]ddd[.ddd][e[+-]xx]`).
    pub fn from_decimal_str(s: &str) -> Option<Dd> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        let (neg, rest) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (mant, exp) = match rest.find(['e', 'E']) {
            Some(i) => (&rest[..i], rest[i + 1..].parse::<i32>().ok()?),
            None => (rest, 0),
        };
        let mut value = Dd::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_dot = false;
        let mut seen_digit = false;
        let ten = Dd::from_u64(10);
        for b in mant.bytes() {
            match b {
                b'0'..=b'9' => {
                    value = value * ten + Dd::from_u64(u64::from(b - b'0'));
                    if seen_dot {
                        frac_digits += 1;
                    }
                    seen_digit = true;
                }
                b'.' if !seen_dot => seen_dot = true,
                _ => return None,
            }
        }
        if !seen_digit {
            return None;
        }
        let scale = exp - frac_digits;
        let mut out = value * ten.powi(scale as i64);
        if neg {
            out = -out;
        }
        Some(out)
    }
}

/// `x - k * c` where `c` is a three-limb constant and `k` is an integral `f64`.
#[inline]
fn reduce_by(x: Dd, k: f64, c: Triple) -> Dd {
    let (p0h, p0l) = two_prod(k, c.c0);
    let (p1h, p1l) = two_prod(k, c.c1);
    let p2 = k * c.c2;
    let mut r = x - Dd::new(p0h, 0.0);
    r -= Dd::new(p0l, 0.0);
    r -= Dd::new(p1h, 0.0);
    r -= Dd::new(p1l, 0.0);
    r -= Dd::from_f64(p2);
    r
}

/// Taylor sine and cosine for `|r| <= pi/4` (plus reduction slack).
fn taylor_sin_cos(r: Dd) -> (Dd, Dd) {
    let r2 = r * r;
    // sine
    let mut s = r;
    let mut term = r;
    let mut k = 1u64;
    loop {
        term = term * r2 / Dd::from_u64((2 * k) * (2 * k + 1));
        if k % 2 == 1 {
            s -= term;
        } else {
            s += term;
        }
        if term.hi.abs() <= 1.0e-35 || k > 20 {
            break;
        }
        k += 1;
    }
    // cosine
    let mut c = Dd::ONE;
    let mut term = Dd::ONE;
    let mut k = 1u64;
    loop {
        term = term * r2 / Dd::from_u64((2 * k - 1) * (2 * k));
        if k % 2 == 1 {
            c -= term;
        } else {
            c += term;
        }
        if term.hi.abs() <= 1.0e-35 || k > 20 {
            break;
        }
        k += 1;
    }
    (s, c)
}

fn pow2(k: i32) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        self - rhs * (self / rhs).trunc()
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

macro_rules! impl_assign {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Dd {
            #[inline]
            fn $method(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}
impl_assign!(AddAssign, add_assign, +);
impl_assign!(SubAssign, sub_assign, -);
impl_assign!(MulAssign, mul_assign, *);
impl_assign!(DivAssign, div_assign, /);

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        let (hi, lo) = quick_two_sum(p, e + self.lo * rhs);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: f64) -> Dd {
        self + Dd::from_f64(rhs)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(33))
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, ()> {
        if radix != 10 {
            return Err(());
        }
        Dd::from_decimal_str(s).ok_or(())
    }
}

impl FromPrimitive for Dd {
    fn from_i64(n: i64) -> Option<Dd> {
        Some(Dd::from_i64(n))
    }
    fn from_u64(n: u64) -> Option<Dd> {
        Some(Dd::from_u64(n))
    }
    fn from_f64(n: f64) -> Option<Dd> {
        Some(Dd::from_f64(n))
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        if t.hi.abs() < 9.2e18 {
            Some(t.hi as i64 + t.lo as i64)
        } else {
            None
        }
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}
