//! Explicit asymptotic inequalities: the r-th-prime upper bound, two-sided
//! Stirling bounds for the factorial, and log-binomial coefficients.
//!
//! Everything here is computed in natural-log domain so that quantities
//! like `log C(10^6, 5*10^5)` never overflow, and the sharp two-sided
//! bounds keep their meaning at extended precision.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_bigint::BigUint;

/// Value of the bound `r (ln r + ln ln r)`, flagged when `r` lies outside
/// the range where the bound is proved (`r >= 6`).
#[derive(Clone, Copy, Debug)]
pub struct PrimeBound {
    pub r: u64,
    pub value: f64,
    /// False for r in {3, 4, 5}: a value is still returned so grid sweeps
    /// stay total, but the inequality `p_r < value` is not guaranteed.
    pub within_validity: bool,
}

/// Upper bound for the r-th prime: `p_r < r (ln r + ln ln r)` for `r >= 6`.
pub fn prime_upper_bound(r: u64) -> Result<PrimeBound> {
    if r < 3 {
        return Err(Error::domain(
            "prime_upper_bound requires r >= 3 (ln ln r undefined or nonpositive)",
        ));
    }
    let rf = r as f64;
    Ok(PrimeBound {
        r,
        value: rf * (rf.ln() + rf.ln().ln()),
        within_validity: r >= 6,
    })
}

/// Two-sided bracket for `log(n!)`:
/// `n^{n+1/2} e^{-n+1/(12n+1)} < n!/sqrt(2 pi) < n^{n+1/2} e^{-n+1/(12n)}`.
#[derive(Clone, Copy, Debug)]
pub struct StirlingBounds<R: Real> {
    pub n: u64,
    pub log_lower: R,
    pub log_upper: R,
}

pub fn stirling_bounds<R: Real>(n: u64) -> StirlingBounds<R> {
    assert!(n >= 1, "stirling_bounds requires n >= 1");
    let nf = R::from_u64(n);
    let half = R::from_f64(0.5);
    let core = (nf + half) * nf.ln() - nf + R::ln_sqrt_2pi();
    let twelve_n = R::from_u64(12 * n);
    StirlingBounds {
        n,
        log_lower: core + (twelve_n + R::one()).recip(),
        log_upper: core + twelve_n.recip(),
    }
}

// Bernoulli-based Stirling series applies from here on; smaller arguments
// are lifted with the Gamma recurrence.
const STIRLING_LIFT: f64 = 32.0;

// B_{2k} / ((2k)(2k-1)) as exact rationals, k = 1..=13. Truncation error
// after 13 terms is below 1e-36 relative for x >= 32.
const STIRLING_COEFF: [(i64, i64); 13] = [
    (1, 12),
    (-1, 360),
    (1, 1260),
    (-1, 1680),
    (5, 5940),
    (-691, 360360),
    (7, 1092),
    (-3617, 122400),
    (43867, 244188),
    (-174611, 125400),
    (854513, 63756),
    (-236364091, 1506960),
    (8553103, 3900),
];

/// `ln Gamma(x)` for `x > 0` by the Stirling series with recurrence lift.
pub fn ln_gamma<R: Real>(x: R) -> R {
    assert!(x > R::zero(), "ln_gamma requires x > 0");
    let mut shift = R::zero();
    let mut y = x;
    while y.to_f64() < STIRLING_LIFT {
        shift = shift + y.ln();
        y = y + R::one();
    }
    let half = R::from_f64(0.5);
    let mut series = R::zero();
    let inv_y2 = (y * y).recip();
    let mut power = y.recip();
    for (num, den) in STIRLING_COEFF {
        series = series + R::from_i64(num) / R::from_i64(den) * power;
        power = power * inv_y2;
    }
    (y - half) * y.ln() - y + R::ln_sqrt_2pi() + series - shift
}

/// `log C(m, r)` with absolute error below 1e-10 for m up to 1e6.
/// Internally evaluated at extended precision; the only loss is the final
/// rounding of the result to `f64`.
pub fn log_binomial(m: u64, r: u64) -> Result<f64> {
    log_binomial_x(m, r).map(|v| v.to_f64())
}

/// Extended-precision variant of [`log_binomial`].
pub fn log_binomial_x(m: u64, r: u64) -> Result<Dd> {
    if r > m {
        return Err(Error::invalid("log_binomial requires r <= m"));
    }
    if r == 0 || r == m {
        return Ok(Dd::ZERO);
    }
    let lg = |k: u64| ln_gamma(Dd::from_u64(k + 1));
    Ok(lg(m) - lg(r) - lg(m - r))
}

/// Natural log of an arbitrarily large positive integer at extended
/// precision (relative error ~1e-31).
pub fn ln_biguint(x: &BigUint) -> Dd {
    assert!(*x != BigUint::ZERO, "ln of zero");
    let bits = x.bits();
    if bits <= 106 {
        let mut v = 0u128;
        for (i, d) in x.iter_u64_digits().enumerate() {
            v |= (d as u128) << (64 * i);
        }
        Dd::from_u128(v).ln()
    } else {
        let shift = bits - 106;
        let top = x >> shift;
        let mut v = 0u128;
        for (i, d) in top.iter_u64_digits().enumerate() {
            v |= (d as u128) << (64 * i);
        }
        Dd::from_u128(v).ln() + Dd::LN_2 * Dd::from_u64(shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::primes_up_to;

    #[test]
    fn prime_bound_examples() {
        let b6 = prime_upper_bound(6).unwrap();
        // 6 (ln 6 + ln ln 6) = 14.2497453000642857923...
        assert!((b6.value - 14.249745300064286).abs() < 1e-12);
        assert!(b6.within_validity);
        assert!(b6.value > 13.0);

        let b100 = prime_upper_bound(100).unwrap();
        assert!(b100.value > 541.0);

        let b5 = prime_upper_bound(5).unwrap();
        assert!(!b5.within_validity);

        assert!(prime_upper_bound(2).is_err());
    }

    #[test]
    fn prime_bound_dominates_sieve_up_to_1e4() {
        let table = primes_up_to(200_000).unwrap();
        for r in 6..=10_000u64 {
            let p = table.primes()[(r - 1) as usize] as f64;
            let b = prime_upper_bound(r).unwrap();
            assert!(p < b.value, "r={r}: p_r={p} bound={}", b.value);
        }
    }

    #[test]
    fn stirling_brackets_exact_factorials() {
        let mut fact = BigUint::from(1u32);
        for n in 1..=1000u64 {
            fact *= n;
            let ln_fact = ln_biguint(&fact);
            let b: StirlingBounds<Dd> = stirling_bounds(n);
            assert!(b.log_lower <= ln_fact, "n={n} lower");
            assert!(ln_fact <= b.log_upper, "n={n} upper");
            // bracket width never exceeds 1/(12n) - 1/(12n+1), evaluated
            // in the cancellation-free form 1/(12n (12n+1))
            let width = (b.log_upper - b.log_lower).to_f64();
            let budget = 1.0 / ((12 * n) as f64 * (12 * n + 1) as f64);
            assert!(width <= budget * (1.0 + 1e-12), "n={n} width");
        }
    }

    #[test]
    fn stirling_n1_brackets_zero() {
        let b: StirlingBounds<f64> = stirling_bounds(1);
        assert!(b.log_lower <= 0.0 && 0.0 <= b.log_upper);
    }

    #[test]
    fn stirling_n10() {
        // ln(3628800) = 15.1044125730755152952257093292510704
        let b: StirlingBounds<Dd> = stirling_bounds(10);
        let want = Dd::from_decimal_str("15.1044125730755152952257093292510704").unwrap();
        assert!(b.log_lower <= want && want <= b.log_upper);
    }

    #[test]
    fn ln_gamma_matches_reference() {
        // values from an independent arbitrary-precision evaluation
        let cases = [
            (1000.5, "5908.67417584867748868387473406262488"),
            (3.25, "0.935801931108725358258467518541896936"),
            (1001.0, "5912.12817848816334887813088672549388"),
        ];
        for (x, want) in cases {
            let got = ln_gamma(Dd::from_f64(x));
            let w = Dd::from_decimal_str(want).unwrap();
            assert!(
                ((got - w) / w).abs().to_f64() < 1e-28,
                "x={x} got {got} want {want}"
            );
        }
        // f64 instantiation agrees with the Dd one to f64 accuracy
        let a = ln_gamma(171.25f64);
        let b = ln_gamma(Dd::from_f64(171.25)).to_f64();
        assert!((a - b).abs() / b.abs() < 1e-13);
    }

    fn exact_binomial(m: u64, r: u64) -> BigUint {
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for i in 0..r.min(m - r) {
            num *= m - i;
            den *= i + 1;
        }
        num / den
    }

    #[test]
    fn log_binomial_matches_exact_big_integer() {
        for (m, r) in [(100u64, 17u64), (4, 2), (52, 26), (1000, 3), (1000, 999)] {
            let want = ln_biguint(&exact_binomial(m, r)).to_f64();
            let got = log_binomial(m, r).unwrap();
            assert!((got - want).abs() < 1e-11, "C({m},{r}): {got} vs {want}");
        }
        // anchor from an independent evaluation
        assert!((log_binomial(100, 17).unwrap() - 43.341168809999607).abs() < 1e-11);
        assert!((log_binomial(1_000_000, 12).unwrap() - 145.7988461996564).abs() < 1e-10);
    }

    #[test]
    fn log_binomial_huge_m_absolute_error() {
        // C(10^6, 5*10^5): reference 693140.047013063682552747746052864234
        let got = log_binomial(1_000_000, 500_000).unwrap();
        assert!((got - 693140.0470130637).abs() < 1e-9);
        let x = log_binomial_x(1_000_000, 500_000).unwrap();
        let want = Dd::from_decimal_str("693140.047013063682552747746052864234").unwrap();
        assert!((x - want).abs().to_f64() < 1e-20);
    }

    #[test]
    fn log_binomial_edges_and_symmetry() {
        assert_eq!(log_binomial(7, 0).unwrap(), 0.0);
        assert_eq!(log_binomial(7, 7).unwrap(), 0.0);
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-14);
        assert!(log_binomial(3, 4).is_err());
        for m in 1..=40u64 {
            for r in 0..=m {
                assert_eq!(
                    log_binomial(m, r).unwrap(),
                    log_binomial(m, m - r).unwrap(),
                    "symmetry C({m},{r})"
                );
            }
        }
    }

    #[test]
    fn ln_biguint_large_value() {
        // 2^200 * 3^50: ln = 200 ln2 + 50 ln3
        let x = BigUint::from(2u32).pow(200) * BigUint::from(3u32).pow(50);
        let want = Dd::LN_2 * Dd::from_u64(200) + Dd::from_u64(3).ln() * Dd::from_u64(50);
        let got = ln_biguint(&x);
        assert!(((got - want) / want).abs().to_f64() < 1e-29);
    }
}
