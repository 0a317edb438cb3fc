//! Evaluation of `zeta(alpha + it)` on the open strip `1/2 < alpha < 1`:
//! plain truncated Dirichlet polynomials, the corrected form with the
//! `x^{1-s}/(s-1)` term, and an independent high-accuracy Euler–Maclaurin
//! oracle carried entirely in double-double arithmetic.
//!
//! Phase policy: `t log n` is formed from an extended-precision log table
//! and reduced modulo 2 pi at extended precision before any trigonometric
//! call. At `t log n ~ 1e5` a native-precision phase would already have
//! absorbed ~1e-11 of error, which the near-tie analysis downstream cannot
//! tolerate.

use crate::caps::ResourceCaps;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Which operation produced a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaMethod {
    Truncated,
    Corrected,
    Reference,
}

/// One evaluation of `zeta(alpha + it)` with its error estimate.
#[derive(Clone, Copy, Debug)]
pub struct ZetaSample {
    pub alpha: f64,
    pub t: f64,
    pub value: Complex64,
    pub method: ZetaMethod,
    pub est_error: f64,
}

/// Empirical O(1) window for the plain truncated sum on its validity
/// range; measured far below this, asserted only against this ceiling.
pub const TRUNCATED_ERROR_WINDOW: f64 = 10.0;

/// Default constant in the corrected-form error estimate `c x^{-alpha}`.
pub const CORRECTED_ERROR_CONSTANT: f64 = 2.0;

/// Default constant C in the validity condition `2 pi x >= C |t|`.
pub const VALIDITY_CONSTANT: f64 = 2.0;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in the open interval (1/2, 1)"));
    }
    Ok(())
}

/// Extended-precision natural logs of 1..=n, shared across evaluations.
pub struct LnTable {
    lns: Vec<Dd>,
}

impl LnTable {
    pub fn up_to(n_max: u64) -> LnTable {
        let lns = (1..=n_max)
            .into_par_iter()
            .map(|n| Dd::from_u64(n).ln())
            .collect();
        LnTable { lns }
    }

    #[inline]
    pub fn ln(&self, n: u64) -> Dd {
        self.lns[(n - 1) as usize]
    }

    pub fn len(&self) -> u64 {
        self.lns.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.lns.is_empty()
    }
}

/// Reusable truncated-sum evaluator: fixed `alpha` and cutoff, shared log
/// and coefficient tables.
pub struct TruncatedEvaluator {
    alpha: f64,
    t_param: f64,
    n_terms: u64,
    lns: LnTable,
    coeffs: Vec<f64>,
}

impl TruncatedEvaluator {
    pub fn new(alpha: f64, t_param: f64) -> Result<TruncatedEvaluator> {
        check_alpha(alpha)?;
        if !(t_param >= 2.0) {
            return Err(Error::invalid("truncated evaluator requires T >= 2"));
        }
        let n_terms = t_param.floor() as u64;
        let lns = LnTable::up_to(n_terms);
        let coeffs = (1..=n_terms).map(|n| (n as f64).powf(-alpha)).collect();
        Ok(TruncatedEvaluator {
            alpha,
            t_param,
            n_terms,
            lns,
            coeffs,
        })
    }

    pub fn lower_t(&self) -> f64 {
        self.t_param.powf(1.0 - self.alpha)
    }

    pub fn t_param(&self) -> f64 {
        self.t_param
    }

    /// Plain partial sum, no window check.
    pub fn value_unchecked(&self, t: f64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for n in 1..=self.n_terms {
            let (s, c) = (self.lns.ln(n) * t).sin_cos_f64();
            let w = self.coeffs[(n - 1) as usize];
            re.add(w * c);
            im.add(-(w * s));
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn eval(&self, t: f64) -> Result<ZetaSample> {
        let lower = self.lower_t();
        if !(t >= lower * (1.0 - 1e-12) && t <= self.t_param * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "t = {t} outside the truncated-sum validity window [T^(1-alpha), T] = [{lower}, {}]",
                self.t_param
            )));
        }
        Ok(ZetaSample {
            alpha: self.alpha,
            t,
            value: self.value_unchecked(t),
            method: ZetaMethod::Truncated,
            est_error: TRUNCATED_ERROR_WINDOW,
        })
    }
}

/// `sum_{n=1}^{floor(T)} n^{-alpha-it}`, valid for `t in [T^{1-alpha}, T]`.
pub fn zeta_truncated(alpha: f64, t: f64, t_param: f64) -> Result<ZetaSample> {
    TruncatedEvaluator::new(alpha, t_param)?.eval(t)
}

/// Reusable corrected-form evaluator at a fixed cutoff `x`.
pub struct CorrectedEvaluator {
    alpha: f64,
    x: f64,
    n_terms: u64,
    lns: LnTable,
    coeffs: Vec<f64>,
    validity_c: f64,
    error_c: f64,
}

impl CorrectedEvaluator {
    pub fn new(alpha: f64, x: f64) -> Result<CorrectedEvaluator> {
        Self::with_constants(alpha, x, VALIDITY_CONSTANT, CORRECTED_ERROR_CONSTANT)
    }

    pub fn with_constants(
        alpha: f64,
        x: f64,
        validity_c: f64,
        error_c: f64,
    ) -> Result<CorrectedEvaluator> {
        check_alpha(alpha)?;
        if !(x >= 2.0) {
            return Err(Error::invalid("corrected form requires x >= 2"));
        }
        if !(validity_c > 1.0) {
            return Err(Error::invalid("validity constant C must exceed 1"));
        }
        let n_terms = x.floor() as u64;
        let lns = LnTable::up_to(n_terms);
        let coeffs = (1..=n_terms).map(|n| (n as f64).powf(-alpha)).collect();
        Ok(CorrectedEvaluator {
            alpha,
            x,
            n_terms,
            lns,
            coeffs,
            validity_c,
            error_c,
        })
    }

    pub fn eval(&self, t: f64) -> Result<ZetaSample> {
        if 2.0 * std::f64::consts::PI * self.x < self.validity_c * t.abs() {
            return Err(Error::domain(format!(
                "validity condition 2 pi x >= C |t| violated: 2 pi {} < {} * |{t}|",
                self.x, self.validity_c
            )));
        }
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for n in 1..=self.n_terms {
            let (s, c) = (self.lns.ln(n) * t).sin_cos_f64();
            let w = self.coeffs[(n - 1) as usize];
            re.add(w * c);
            im.add(-(w * s));
        }
        // x^{1-s}/(s-1) with s = alpha + it
        let (sx, cx) = (Dd::from_f64(self.x).ln() * t).sin_cos_f64();
        let amp = self.x.powf(1.0 - self.alpha);
        let numer = Complex64::new(amp * cx, -(amp * sx));
        let denom = Complex64::new(self.alpha - 1.0, t);
        let corr = numer / denom;
        Ok(ZetaSample {
            alpha: self.alpha,
            t,
            value: Complex64::new(re.value(), im.value()) + corr,
            method: ZetaMethod::Corrected,
            est_error: self.error_c * self.x.powf(-self.alpha),
        })
    }
}

/// `sum_{n<=x} n^{-s} + x^{1-s}/(s-1)`, valid for `2 pi x >= C |t|`.
pub fn zeta_corrected(alpha: f64, t: f64, x: f64) -> Result<ZetaSample> {
    CorrectedEvaluator::new(alpha, x)?.eval(t)
}

/// Moduli of the truncated sum over a uniform ascending grid. Pointwise
/// identical to [`zeta_truncated`] (same summation order); grid points are
/// distributed across workers and merged in index order.
pub fn batch_zeta_modulus(alpha: f64, t_grid: &[f64], t_param: f64) -> Result<Vec<f64>> {
    if t_grid.is_empty() {
        return Ok(Vec::new());
    }
    if t_grid.len() >= 3 {
        let d0 = t_grid[1] - t_grid[0];
        for w in t_grid.windows(2) {
            if ((w[1] - w[0]) - d0).abs() > 1e-9 * d0.abs().max(1e-9) {
                return Err(Error::invalid("grid must be uniform"));
            }
        }
    }
    let ev = TruncatedEvaluator::new(alpha, t_param)?;
    let lower = ev.lower_t();
    for &t in t_grid {
        if !(t >= lower * (1.0 - 1e-12) && t <= t_param * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "grid point {t} outside [T^(1-alpha), T] = [{lower}, {t_param}]"
            )));
        }
    }
    Ok(t_grid
        .par_iter()
        .map(|&t| ev.value_unchecked(t).norm())
        .collect())
}

// ---------------------------------------------------------------------
// Euler–Maclaurin reference oracle in double-double complex arithmetic
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct DdC {
    re: Dd,
    im: Dd,
}

impl DdC {
    const ZERO: DdC = DdC {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    fn new(re: Dd, im: Dd) -> DdC {
        DdC { re, im }
    }

    fn add(self, o: DdC) -> DdC {
        DdC::new(self.re + o.re, self.im + o.im)
    }

    fn mul(self, o: DdC) -> DdC {
        DdC::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    fn scale(self, k: Dd) -> DdC {
        DdC::new(self.re * k, self.im * k)
    }

    fn div(self, o: DdC) -> DdC {
        let d = o.re * o.re + o.im * o.im;
        DdC::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }

    fn norm(self) -> Dd {
        (self.re * self.re + self.im * self.im).sqrt()
    }

    fn to_complex64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `n^{-s}` for `s = alpha + it` at extended precision.
fn n_pow_minus_s(ln_n: Dd, alpha: Dd, t: Dd) -> DdC {
    let amp = (-(alpha * ln_n)).exp();
    let (s, c) = (t * ln_n).sin_cos();
    DdC::new(amp * c, -(amp * s))
}

// B_2 .. B_34 as exact rationals (numerator, denominator)
const BERNOULLI: [(i64, i64); 17] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
    (-7709321041217, 510),
    (2577687858367, 6),
];

/// `B_{2k} / (2k)!` at extended precision: exact rationals over exact
/// factorials for `k <= 17`; beyond that via
/// `B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k)/(2 pi)^{2k}`, where the zeta sum
/// converges to working precision within a handful of terms.
fn b2k_over_factorial(k: usize) -> Dd {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (1..=80usize)
            .map(|k| {
                if k <= BERNOULLI.len() {
                    let (num, den) = BERNOULLI[k - 1];
                    let mut fact = Dd::ONE;
                    for j in 2..=(2 * k) as u64 {
                        fact = fact * Dd::from_u64(j);
                    }
                    return Dd::from_i64(num) / (Dd::from_i64(den) * fact);
                }
                let mut z = Dd::ONE;
                let mut n = 2u64;
                loop {
                    let term = Dd::from_u64(n).powi(-(2 * k as i64));
                    z += term;
                    if term.to_f64() < 1e-36 || n > 64 {
                        break;
                    }
                    n += 1;
                }
                let magnitude = z * Dd::from_u64(2) / Dd::TWO_PI.powi(2 * k as i64);
                if k % 2 == 1 {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect()
    });
    table[k - 1]
}

/// One Euler–Maclaurin evaluation with cutoff `n`; `None` when the
/// correction terms fail to reach `tol` before they stop shrinking.
fn euler_maclaurin_at(alpha: f64, t: f64, n: u64, tol: f64) -> Option<DdC> {
    let a = Dd::from_f64(alpha);
    let td = Dd::from_f64(t);
    let s = DdC::new(a, td);

    let mut acc_hi = DdC::ZERO;
    for j in 1..n {
        let ln_j = Dd::from_u64(j).ln();
        acc_hi = acc_hi.add(n_pow_minus_s(ln_j, a, td));
    }

    let ln_n = Dd::from_u64(n).ln();
    let n_minus_s = n_pow_minus_s(ln_n, a, td);
    // + N^{1-s}/(s-1)
    let n_pow_1_minus_s = n_minus_s.scale(Dd::from_u64(n));
    let s_minus_1 = DdC::new(a - Dd::ONE, td);
    acc_hi = acc_hi.add(n_pow_1_minus_s.div(s_minus_1));
    // + N^{-s}/2
    acc_hi = acc_hi.add(n_minus_s.scale(Dd::from_f64(0.5)));

    // correction terms T_k = B_{2k}/(2k)! * prod_{j=0}^{2k-2} (s+j) * N^{-s-2k+1}
    let inv_n2 = Dd::from_u64(n * n).recip();
    let mut poly = s; // prod (s + j) so far: for k=1 this is s
    let mut term = n_minus_s
        .scale(Dd::from_u64(n).recip())
        .mul(poly)
        .scale(b2k_over_factorial(1));
    acc_hi = acc_hi.add(term);
    let mut prev_mag = term.norm().to_f64().abs();
    for k in 1..80usize {
        // advance to k+1: two more polynomial factors, B-ratio, N^{-2}
        let j0 = Dd::from_u64(2 * k as u64 - 1);
        let j1 = Dd::from_u64(2 * k as u64);
        poly = poly.mul(s.add(DdC::new(j0, Dd::ZERO)));
        poly = poly.mul(s.add(DdC::new(j1, Dd::ZERO)));
        let b_ratio = b2k_over_factorial(k + 1) / b2k_over_factorial(k);
        term = term
            .mul(s.add(DdC::new(j0, Dd::ZERO)))
            .mul(s.add(DdC::new(j1, Dd::ZERO)))
            .scale(b_ratio * inv_n2);
        let mag = term.norm().to_f64().abs();
        if mag > prev_mag {
            return None; // divergence onset before reaching tolerance
        }
        acc_hi = acc_hi.add(term);
        if mag < tol * acc_hi.norm().to_f64().abs().max(1e-300) {
            return Some(acc_hi);
        }
        prev_mag = mag;
    }
    None
}

/// Independent high-accuracy evaluation of `zeta(alpha + it)` accurate to
/// `target_digits` significant digits.
pub fn zeta_reference(
    alpha: f64,
    t: f64,
    target_digits: u32,
    caps: &ResourceCaps,
) -> Result<ZetaSample> {
    check_alpha(alpha)?;
    if target_digits == 0 || target_digits > 30 {
        return Err(Error::invalid("target_digits must lie in 1..=30"));
    }
    if t.abs() > caps.max_reference_t {
        return Err(Error::refusal(format!(
            "|t| = {} exceeds the reference-oracle cap {}",
            t.abs(),
            caps.max_reference_t
        )));
    }
    let tol = 10f64.powi(-(target_digits as i32 + 4));
    let mut n = ((t.abs() + 80.0) * 0.44).ceil().max(50.0) as u64;
    for _ in 0..8 {
        if let Some(v) = euler_maclaurin_at(alpha, t, n, tol) {
            let value = v.to_complex64();
            return Ok(ZetaSample {
                alpha,
                t,
                value,
                method: ZetaMethod::Reference,
                est_error: value.norm() * 10f64.powi(-(target_digits as i32)),
            });
        }
        n *= 2;
    }
    Err(Error::domain(
        "Euler–Maclaurin failed to converge (unreachable for in-range inputs)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn caps() -> ResourceCaps {
        ResourceCaps::default()
    }

    // zeta(3/4) = -3.44128538694522289439513996070931546
    const ZETA_3_4: f64 = -3.4412853869452229;

    #[test]
    fn reference_at_zero_matches_published_constants() {
        let s = zeta_reference(0.75, 0.0, 25, &caps()).unwrap();
        assert!((s.value.re - ZETA_3_4).abs() < 1e-14, "{}", s.value.re);
        assert!(s.value.im.abs() < 1e-20);

        let s6 = zeta_reference(0.6, 0.0, 20, &caps()).unwrap();
        assert!((s6.value.re - (-1.9526614482240007)).abs() < 1e-13);
        let s9 = zeta_reference(0.9, 0.0, 20, &caps()).unwrap();
        assert!((s9.value.re - (-9.430114019402252)).abs() < 1e-12);
    }

    #[test]
    fn reference_matches_independent_values_off_axis() {
        // anchors from an independent arbitrary-precision implementation
        let s = zeta_reference(0.75, 100.0, 20, &caps()).unwrap();
        assert!((s.value.re - 2.0029919952553958).abs() < 1e-13);
        assert!((s.value.im - (-0.05439207119009259)).abs() < 1e-13);

        let s = zeta_reference(0.75, 1000.0, 20, &caps()).unwrap();
        assert!((s.value.re - 0.8337131300031520).abs() < 1e-12);
        assert!((s.value.im - 0.2916234246335925).abs() < 1e-12);

        let s = zeta_reference(0.6, 10.0, 20, &caps()).unwrap();
        assert!((s.value.re - 1.5099176995034531).abs() < 1e-13);
        assert!((s.value.im - (-0.11533888503292163)).abs() < 1e-13);

        let s = zeta_reference(0.9, 50.0, 20, &caps()).unwrap();
        assert!((s.value.re - 0.3708106243211487).abs() < 1e-13);
        assert!((s.value.im - 0.2977872366968046).abs() < 1e-13);
    }

    #[test]
    fn reference_conjugate_symmetry() {
        let plus = zeta_reference(0.75, 37.25, 22, &caps()).unwrap();
        let minus = zeta_reference(0.75, -37.25, 22, &caps()).unwrap();
        assert!((plus.value.re - minus.value.re).abs() < 1e-18);
        assert!((plus.value.im + minus.value.im).abs() < 1e-18);
        assert!((plus.value.norm() - minus.value.norm()).abs() < 1e-18);
    }

    #[test]
    fn reference_self_consistency_on_doubling() {
        let tol = 1e-24;
        for &t in &[0.0, 5.5, 313.77] {
            let v1 = euler_maclaurin_at(0.75, t, 400, tol).unwrap().to_complex64();
            let v2 = euler_maclaurin_at(0.75, t, 800, tol).unwrap().to_complex64();
            let rel = (v1 - v2).norm() / v2.norm();
            assert!(rel < 1e-20, "t={t} rel={rel:.3e}");
        }
    }

    #[test]
    fn reference_respects_caps() {
        assert!(matches!(
            zeta_reference(0.75, 2e7, 10, &caps()),
            Err(Error::ResourceRefusal(_))
        ));
        assert!(zeta_reference(0.75, 1.0, 31, &caps()).is_err());
    }

    #[test]
    fn corrected_approaches_zeta_at_t0() {
        let s = zeta_corrected(0.75, 0.0, 1e6).unwrap();
        // remaining error is ~ x^{-3/4}/2 = 1.6e-5
        assert!((s.value.re - ZETA_3_4).abs() < 1e-4);
        assert!(s.value.re > ZETA_3_4, "error term has known sign here");
        assert!(s.est_error > 0.0);
    }

    #[test]
    fn corrected_error_scales_like_x_to_minus_alpha() {
        let reference = zeta_reference(0.75, 0.0, 25, &caps()).unwrap().value;
        let mut errs = Vec::new();
        for &x in &[10.0, 100.0, 1000.0, 10000.0] {
            let s = zeta_corrected(0.75, 0.0, x).unwrap();
            errs.push((s.value - reference).norm());
        }
        // consecutive decades shrink by roughly 10^{-0.75} = 0.178
        for w in errs.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio < 0.35, "{errs:?}");
        }
    }

    #[test]
    fn corrected_rejects_out_of_window_t() {
        // x = 10: 2 pi x = 62.8; C = 2 allows |t| <= 31.4
        assert!(zeta_corrected(0.75, 100.0, 10.0).is_err());
        assert!(zeta_corrected(0.75, 30.0, 10.0).is_ok());
    }

    #[test]
    fn truncated_window_boundaries() {
        // alpha = 3/4, T = 1e4: window is [10, 1e4]
        assert!(zeta_truncated(0.75, 10.0, 1e4).is_ok());
        assert!(zeta_truncated(0.75, 9.99, 1e4).is_err());
        assert!(zeta_truncated(0.75, 1e4, 1e4).is_ok());
        assert!(zeta_truncated(0.75, 1.001e4, 1e4).is_err());
    }

    #[test]
    fn truncated_tracks_reference_within_o1_window() {
        let t_param = 2000.0;
        let ev = TruncatedEvaluator::new(0.75, t_param).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let caps = caps();
        let mut max_diff: f64 = 0.0;
        for _ in 0..40 {
            let t = rng.gen_range(ev.lower_t()..t_param);
            let trunc = ev.eval(t).unwrap().value;
            let refv = zeta_reference(0.75, t, 18, &caps).unwrap().value;
            max_diff = max_diff.max((trunc - refv).norm());
        }
        assert!(
            max_diff <= TRUNCATED_ERROR_WINDOW,
            "max deviation {max_diff}"
        );
    }

    #[test]
    fn batch_matches_single_point_evaluations_exactly() {
        let t_param = 500.0;
        let ev = TruncatedEvaluator::new(0.6, t_param).unwrap();
        let lower = ev.lower_t();
        let grid: Vec<f64> = (0..200).map(|i| lower + i as f64 * 2.0).collect();
        let batch = batch_zeta_modulus(0.6, &grid, t_param).unwrap();
        for (i, &t) in grid.iter().enumerate() {
            let single = ev.value_unchecked(t).norm();
            assert_eq!(batch[i], single, "same summation order, same bits");
        }
    }

    #[test]
    fn batch_rejects_non_uniform_and_empty_is_empty() {
        assert!(batch_zeta_modulus(0.75, &[10.0, 11.0, 13.0], 1e3).is_err());
        assert!(batch_zeta_modulus(0.75, &[], 1e3).unwrap().is_empty());
        let one = batch_zeta_modulus(0.75, &[10.0], 1e3).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn bernoulli_over_factorial_sanity() {
        // B_2/2! = 1/12, B_4/4! = -1/720
        assert!((b2k_over_factorial(1).to_f64() - 1.0 / 12.0).abs() < 1e-25);
        assert!((b2k_over_factorial(2).to_f64() + 1.0 / 720.0).abs() < 1e-25);
    }
}
