//! Desk-scale extreme-value search for `|zeta(alpha + it)|`, the explicit
//! lower-bound and threshold formulas, and Monte-Carlo estimation of the
//! measure of level sets.
//!
//! Asymptotic honesty: at reachable `T` the proved lower bound is tiny
//! (about 1.1 to 1.2) and far below the true maximum, so the search asserts
//! only the inequality, never sharpness.

use crate::caps::ResourceCaps;
use crate::error::{Error, Result};
use crate::zeta::{CorrectedEvaluator, TruncatedEvaluator};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

fn check_alpha_t(alpha: f64, t_param: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in the open interval (1/2, 1)"));
    }
    if !(t_param >= 16.0) {
        return Err(Error::invalid("T must be >= 16"));
    }
    Ok(())
}

/// `exp(c_alpha (ln T)^{1-alpha} / (ln ln T)^alpha)` with
/// `c_alpha = 0.18 (2 alpha - 1)^{1-alpha}`.
pub fn theorem1_bound(alpha: f64, t_param: f64) -> Result<f64> {
    check_alpha_t(alpha, t_param)?;
    let c = 0.18 * (2.0 * alpha - 1.0).powf(1.0 - alpha);
    let lt = t_param.ln();
    Ok((c * lt.powf(1.0 - alpha) / lt.ln().powf(alpha)).exp())
}

/// The proof's case-split threshold
/// `err(T) = exp(0.2 (2 alpha - 1)^{1-alpha} ln T / ln ln T)`; above it
/// the lower bound holds vacuously.
pub fn err_threshold(alpha: f64, t_param: f64) -> Result<f64> {
    check_alpha_t(alpha, t_param)?;
    let c = 0.2 * (2.0 * alpha - 1.0).powf(1.0 - alpha);
    let lt = t_param.ln();
    Ok((c * lt / lt.ln()).exp())
}

/// `beta = (6 tau)^{1/(1-alpha)}` and the measure floor exponent
/// `2 alpha - 1 - beta` (strictly positive for admissible `tau`).
#[derive(Clone, Copy, Debug)]
pub struct Theorem2Exponents {
    pub beta: f64,
    pub floor_exponent: f64,
}

pub fn theorem2_exponent(alpha: f64, tau: f64) -> Result<Theorem2Exponents> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in the open interval (1/2, 1)"));
    }
    let tau_max = (2.0 * alpha - 1.0).powf(1.0 - alpha) / 6.0;
    if !(tau > 0.0 && tau < tau_max) {
        return Err(Error::invalid(format!(
            "tau must satisfy 0 < tau < (2 alpha - 1)^(1-alpha)/6 = {tau_max}"
        )));
    }
    let beta = (6.0 * tau).powf(1.0 / (1.0 - alpha));
    Ok(Theorem2Exponents {
        beta,
        floor_exponent: 2.0 * alpha - 1.0 - beta,
    })
}

/// Cutoff for the corrected evaluator used below the truncated-sum window.
/// Large enough that the `~x^{-alpha}/2` bias stays below 5e-5 at
/// `alpha = 3/4`, which the `t = 0` anchor checks need.
const SMALL_T_CORRECTED_X: f64 = 3e5;

#[derive(Clone, Copy, Debug)]
pub struct SearchResult {
    pub alpha: f64,
    pub t_param: f64,
    pub t_star: f64,
    pub max_modulus: f64,
    pub grid_step: f64,
    pub refinement_depth: u32,
    pub theorem1_bound: f64,
    pub exceeded: bool,
    /// Whether the maximum was found inside `[T^{1-alpha}, T]` (the range
    /// the resonance argument actually covers) rather than below it.
    pub max_in_resonance_window: bool,
}

impl SearchResult {
    pub fn to_json(&self) -> Value {
        let d = crate::fmt_g17;
        json!({
            "alpha": d(self.alpha),
            "T": d(self.t_param),
            "t_star": d(self.t_star),
            "max_modulus": d(self.max_modulus),
            "grid_step": d(self.grid_step),
            "refinement_depth": self.refinement_depth,
            "theorem1_bound": d(self.theorem1_bound),
            "exceeded": self.exceeded,
            "max_in_resonance_window": self.max_in_resonance_window,
        })
    }
}

struct ModulusEvaluator {
    lower: f64,
    truncated: TruncatedEvaluator,
    corrected: CorrectedEvaluator,
}

impl ModulusEvaluator {
    fn new(alpha: f64, t_param: f64) -> Result<ModulusEvaluator> {
        let truncated = TruncatedEvaluator::new(alpha, t_param)?;
        let lower = truncated.lower_t();
        let x = SMALL_T_CORRECTED_X.max(2.0 * lower);
        let corrected = CorrectedEvaluator::new(alpha, x)?;
        Ok(ModulusEvaluator {
            lower,
            truncated,
            corrected,
        })
    }

    fn modulus(&self, t: f64) -> f64 {
        if t < self.lower {
            self.corrected
                .eval(t)
                .map(|s| s.value.norm())
                .unwrap_or(f64::NEG_INFINITY)
        } else {
            self.truncated.value_unchecked(t).norm()
        }
    }
}

/// Coarse grid over `[0, T]` plus golden-section refinement around the
/// top candidates. Deterministic for fixed inputs.
pub fn search_max(
    alpha: f64,
    t_param: f64,
    grid_step: f64,
    refinement_depth: u32,
    caps: &ResourceCaps,
) -> Result<SearchResult> {
    search_max_with_grid(alpha, t_param, grid_step, refinement_depth, caps).map(|(r, _)| r)
}

/// Same as [`search_max`] but also returns the coarse grid `(t, modulus)`
/// rows for plotting.
pub fn search_max_with_grid(
    alpha: f64,
    t_param: f64,
    grid_step: f64,
    refinement_depth: u32,
    caps: &ResourceCaps,
) -> Result<(SearchResult, Vec<(f64, f64)>)> {
    check_alpha_t(alpha, t_param)?;
    if t_param > caps.max_search_t {
        return Err(Error::refusal(format!(
            "T = {t_param} exceeds the search cap {}",
            caps.max_search_t
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::invalid("grid_step must lie in (0, 0.1]"));
    }
    let ev = ModulusEvaluator::new(alpha, t_param)?;
    let n_points = (t_param / grid_step).floor() as u64;
    let grid: Vec<(f64, f64)> = (0..=n_points)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * grid_step;
            (t, ev.modulus(t))
        })
        .collect();

    // deterministic argmax: strict improvement, first index wins ties
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| {
        grid[b].1
            .partial_cmp(&grid[a].1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut best_t = grid[order[0]].0;
    let mut best_v = grid[order[0]].1;
    for &idx in order.iter().take(5) {
        let center = grid[idx].0;
        let lo = (center - grid_step).max(0.0);
        let hi = (center + grid_step).min(t_param);
        let (t, v) = golden_section_max(|t| ev.modulus(t), lo, hi, refinement_depth);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }

    let bound = theorem1_bound(alpha, t_param)?;
    let result = SearchResult {
        alpha,
        t_param,
        t_star: best_t,
        max_modulus: best_v,
        grid_step,
        refinement_depth,
        theorem1_bound: bound,
        exceeded: best_v >= bound,
        max_in_resonance_window: best_t >= ev.lower,
    };
    Ok((result, grid))
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: u32) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Measure estimate for the level set
/// `{t in [0, T] : |zeta(alpha + it)| >= exp(tau (ln T)^{1-a}/(ln ln T)^a)}`.
#[derive(Clone, Copy, Debug)]
pub struct MeasureReport {
    pub alpha: f64,
    pub tau: f64,
    pub t_param: f64,
    pub threshold: f64,
    pub sampled_fraction: f64,
    pub estimated_measure: f64,
    /// Binomial standard error of `estimated_measure`.
    pub std_error: f64,
    pub theorem2_floor: f64,
    pub beta: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MeasureReport {
    pub fn to_json(&self) -> Value {
        let d = crate::fmt_g17;
        json!({
            "alpha": d(self.alpha),
            "tau": d(self.tau),
            "T": d(self.t_param),
            "threshold": d(self.threshold),
            "sampled_fraction": d(self.sampled_fraction),
            "estimated_measure": d(self.estimated_measure),
            "std_error": d(self.std_error),
            "theorem2_floor": d(self.theorem2_floor),
            "beta": d(self.beta),
            "samples": self.samples,
            "seed": self.seed,
        })
    }
}

/// One evaluated sample point.
#[derive(Clone, Copy, Debug)]
pub struct SampleRow {
    pub t: f64,
    pub modulus: f64,
    pub above_threshold: bool,
}

const STRATA: u64 = 100;

/// Stratified uniform sampling: equal counts per `T/100` stratum (the
/// remainder spread over the first strata), one deterministically seeded
/// generator per stratum, rows merged in stratum order.
pub fn measure_estimate(
    alpha: f64,
    tau: f64,
    t_param: f64,
    samples: u64,
    seed: u64,
    caps: &ResourceCaps,
) -> Result<MeasureReport> {
    measure_estimate_with_rows(alpha, tau, t_param, samples, seed, caps).map(|(r, _)| r)
}

pub fn measure_estimate_with_rows(
    alpha: f64,
    tau: f64,
    t_param: f64,
    samples: u64,
    seed: u64,
    caps: &ResourceCaps,
) -> Result<(MeasureReport, Vec<SampleRow>)> {
    check_alpha_t(alpha, t_param)?;
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    if t_param > caps.max_search_t {
        return Err(Error::refusal(format!(
            "T = {t_param} exceeds the search cap {}",
            caps.max_search_t
        )));
    }
    let exps = theorem2_exponent(alpha, tau)?;
    let lt = t_param.ln();
    let threshold = (tau * lt.powf(1.0 - alpha) / lt.ln().powf(alpha)).exp();
    let ev = ModulusEvaluator::new(alpha, t_param)?;

    let width = t_param / STRATA as f64;
    let rows: Vec<Vec<SampleRow>> = (0..STRATA)
        .into_par_iter()
        .map(|s| {
            let count = samples / STRATA + u64::from(s < samples % STRATA);
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (s + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let base = s as f64 * width;
            (0..count)
                .map(|_| {
                    let t = base + rng.gen::<f64>() * width;
                    let modulus = ev.modulus(t);
                    SampleRow {
                        t,
                        modulus,
                        above_threshold: modulus >= threshold,
                    }
                })
                .collect()
        })
        .collect();
    let rows: Vec<SampleRow> = rows.into_iter().flatten().collect();

    let above = rows.iter().filter(|r| r.above_threshold).count() as f64;
    let frac = above / samples as f64;
    let report = MeasureReport {
        alpha,
        tau,
        t_param,
        threshold,
        sampled_fraction: frac,
        estimated_measure: t_param * frac,
        std_error: t_param * (frac * (1.0 - frac) / samples as f64).sqrt(),
        theorem2_floor: t_param.powf(exps.floor_exponent),
        beta: exps.beta,
        samples,
        seed,
    };
    Ok((report, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> ResourceCaps {
        ResourceCaps::default()
    }

    #[test]
    fn theorem1_bound_anchors() {
        // alpha = 3/4, T = 1e4: 1.15600223113021468...
        let b = theorem1_bound(0.75, 1e4).unwrap();
        assert!((b - 1.1560022311302147).abs() < 1e-12);
        // c_alpha = 0.18 * 0.5^{1/4} = 0.151361354745668617...
        let c = 0.18 * 0.5f64.powf(0.25);
        assert!((c - 0.15136135474566862).abs() < 1e-15);
        assert!(theorem1_bound(0.4, 1e4).is_err());
        assert!(theorem1_bound(0.75, 10.0).is_err());
    }

    #[test]
    fn theorem1_bound_eventually_monotone_in_t() {
        // the exponent (ln T)^{1-a}/(ln ln T)^a grows only once
        // ln ln T > a/(1-a); below that it decreases. At alpha = 0.6 the
        // turning point is ~e^{e^{1.5}} = 88, so the whole grid
        // [1e2, 1e12] ascends; at alpha = 0.75 it sits near 5e8 and the
        // grid is first decreasing, then increasing.
        let mut prev = 0.0;
        for e in 2..=12 {
            let b = theorem1_bound(0.6, 10f64.powi(e)).unwrap();
            assert!(b > prev, "alpha=0.6 T=1e{e}");
            prev = b;
        }
        let at = |t: f64| theorem1_bound(0.75, t).unwrap();
        assert!(at(1e2) > at(1e4), "descending branch");
        assert!(at(1e10) < at(1e11) && at(1e11) < at(1e12), "ascending branch");
    }

    #[test]
    fn err_threshold_anchors_and_domination() {
        // alpha = 3/4, T = 1e6: 2.42266773486482856...
        let e = err_threshold(0.75, 1e6).unwrap();
        assert!((e - 2.4226677348648286).abs() < 1e-12);
        // err(T) dominates the lower bound on the tested grid (the proof
        // splits on this case)
        for alpha in [0.6, 0.75, 0.9] {
            for exp10 in 2..=12 {
                let t = 10f64.powi(exp10);
                assert!(err_threshold(alpha, t).unwrap() > theorem1_bound(alpha, t).unwrap());
            }
        }
        // (2 alpha - 1)^{1-alpha} -> 1 as alpha -> 1
        let near_one = 0.2 * (2.0 * 0.999 - 1.0f64).powf(1.0 - 0.999);
        assert!((near_one - 0.2).abs() < 1e-3);
    }

    #[test]
    fn theorem2_exponent_examples() {
        let e = theorem2_exponent(0.75, 0.05).unwrap();
        assert!((e.beta - 0.0081).abs() < 1e-15);
        assert!((e.floor_exponent - 0.4919).abs() < 1e-15);
        let e = theorem2_exponent(0.6, 0.02).unwrap();
        assert!((e.beta - 0.004988306325798367).abs() < 1e-15);
        // boundary tau is rejected (floor exponent would hit 0)
        let tau_max = 0.5f64.powf(0.25) / 6.0;
        assert!(theorem2_exponent(0.75, tau_max).is_err());
        assert!(theorem2_exponent(0.75, 0.0).is_err());
    }

    #[test]
    fn floor_exponent_positive_on_admissible_grid() {
        for i in 1..20 {
            let alpha = 0.5 + 0.025 * i as f64;
            let tau_max = (2.0 * alpha - 1.0f64).powf(1.0 - alpha) / 6.0;
            for j in 1..20 {
                let tau = tau_max * j as f64 / 20.0;
                let e = theorem2_exponent(alpha, tau).unwrap();
                assert!(
                    e.floor_exponent > 0.0,
                    "alpha={alpha} tau={tau}: {e:?}"
                );
            }
        }
    }

    #[test]
    fn search_small_t_anchor() {
        // T = 1000: the t=0 anchor |zeta(3/4)| = 3.4412... is a floor
        let r = search_max(0.75, 1000.0, 0.1, 10, &caps()).unwrap();
        assert!(r.max_modulus >= 3.4412, "max {}", r.max_modulus);
        assert!(r.t_star >= 0.0 && r.t_star <= 1000.0);
        assert_eq!(r.exceeded, r.max_modulus >= r.theorem1_bound);
    }

    #[test]
    fn search_is_deterministic_and_refinement_monotone() {
        let a = search_max(0.75, 500.0, 0.1, 0, &caps()).unwrap();
        let b = search_max(0.75, 500.0, 0.1, 0, &caps()).unwrap();
        assert_eq!(a.t_star, b.t_star);
        assert_eq!(a.max_modulus, b.max_modulus);
        let refined = search_max(0.75, 500.0, 0.1, 25, &caps()).unwrap();
        assert!(refined.max_modulus >= a.max_modulus);
    }

    #[test]
    fn search_validates_inputs() {
        assert!(search_max(0.75, 1e6, 0.05, 5, &caps()).is_err());
        assert!(search_max(0.75, 1000.0, 0.2, 5, &caps()).is_err());
        assert!(search_max(0.75, 1000.0, 0.0, 5, &caps()).is_err());
    }

    #[test]
    fn measure_estimate_deterministic_and_sane() {
        let (r1, rows1) =
            measure_estimate_with_rows(0.75, 0.05, 400.0, 2000, 99, &caps()).unwrap();
        let (r2, rows2) =
            measure_estimate_with_rows(0.75, 0.05, 400.0, 2000, 99, &caps()).unwrap();
        assert_eq!(r1.estimated_measure, r2.estimated_measure);
        assert_eq!(rows1.len(), rows2.len());
        for (a, b) in rows1.iter().zip(&rows2) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.modulus, b.modulus);
        }
        assert!(r1.estimated_measure >= 0.0 && r1.estimated_measure <= 400.0);
        assert_eq!(rows1.len(), 2000);
        // rows ascend by stratum
        let w = 400.0 / 100.0;
        for (i, row) in rows1.iter().enumerate() {
            let stratum = (i as u64) / 20; // 2000 samples / 100 strata
            assert!(row.t >= stratum as f64 * w && row.t < (stratum + 1) as f64 * w);
        }
    }

    #[test]
    fn measure_doubling_stays_within_binomial_error() {
        // doubling the sample count moves the estimate by less than four
        // combined binomial standard errors in (at least) 19 of 20 seeds
        let c = caps();
        let mut ok = 0;
        for seed in 0..20u64 {
            let a = measure_estimate(0.75, 0.05, 400.0, 1500, seed, &c).unwrap();
            let b = measure_estimate(0.75, 0.05, 400.0, 3000, seed + 1000, &c).unwrap();
            let band = 4.0 * (a.std_error * a.std_error + b.std_error * b.std_error).sqrt();
            if (a.estimated_measure - b.estimated_measure).abs() < band {
                ok += 1;
            }
        }
        assert!(ok >= 19, "only {ok}/20 seed pairs within the error band");
    }

    #[test]
    fn measure_estimate_rejects_bad_inputs() {
        assert!(matches!(
            measure_estimate(0.75, 0.05, 400.0, 0, 1, &caps()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(measure_estimate(0.75, 0.5, 400.0, 10, 1, &caps()).is_err());
    }

    #[test]
    fn measure_tiny_tau_approaches_threshold_one_scan() {
        // tau -> 0+: threshold -> 1; compare the stratified estimate with a
        // direct uniform scan at threshold exactly 1
        let t_param = 200.0;
        let (rep, _) = measure_estimate_with_rows(0.75, 1e-3, t_param, 4000, 7, &caps()).unwrap();
        assert!(rep.threshold < 1.01);
        let ev = ModulusEvaluator::new(0.75, t_param).unwrap();
        let n = 4000;
        let scan = (0..n)
            .filter(|&i| ev.modulus((i as f64 + 0.5) * t_param / n as f64) >= 1.0)
            .count() as f64
            / n as f64;
        assert!(
            (rep.sampled_fraction - scan).abs() < 0.05,
            "{} vs {scan}",
            rep.sampled_fraction
        );
    }
}
