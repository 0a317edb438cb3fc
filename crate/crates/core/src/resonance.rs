//! The resonator `A(t)`, the piecewise-linear weight, closed-form weighted
//! cosine integrals, the frequency-classified decomposition of the
//! resonance integral, and the tail sums that bound the high-frequency
//! contribution.
//!
//! Frequencies are `a = |log(m d_k / (n d_l))|`. Equality of the products
//! is decided exactly in integer arithmetic; only strictly unequal
//! products receive a log-distance, assembled from extended-precision logs
//! after exact cancellation of shared prime factors. Type boundaries:
//! `[0, 1/T]` resonant, `(1/T, 1/(2 T^{1-alpha})]` sign-controlled by the
//! weight, beyond that a tail controlled in aggregate.

use crate::caps::ResourceCaps;
use crate::construction::{
    choose_r, resonator_integer_from_mask, RepresentativeSet, ResonatorInteger,
};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::gcd_sums::restricted_sum_from_primes;
use crate::primes::first_m_primes;
use crate::quadrature::{adaptive_oscillatory, QuadResult};
use crate::scalar::{CompensatedSum, Real};
use crate::zeta::{LnTable, TruncatedEvaluator};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Piecewise-linear integration kernel on `[T^{1-alpha}, T]`: value
/// `3 - t/T` up to the breakpoint `2 T^{1-alpha}`, then `1 - t/T`.
#[derive(Clone, Copy, Debug)]
pub struct WeightedKernel<R: Real> {
    t_param: R,
    alpha: R,
    lower: R,
    breakpoint: R,
    upper: R,
}

impl<R: Real> WeightedKernel<R> {
    pub fn new(t_param: R, alpha: R) -> Result<WeightedKernel<R>> {
        let half = R::from_f64(0.5);
        if !(alpha > half && alpha < R::one()) {
            return Err(Error::invalid("alpha must lie in the open interval (1/2, 1)"));
        }
        if !(t_param >= R::from_f64(2.0)) {
            return Err(Error::invalid("kernel requires T >= 2"));
        }
        let lower = t_param.powf(R::one() - alpha);
        let breakpoint = lower + lower;
        if !(breakpoint <= t_param) {
            return Err(Error::invalid(
                "kernel requires 2 T^(1-alpha) <= T (T too small for this alpha)",
            ));
        }
        Ok(WeightedKernel {
            t_param,
            alpha,
            lower,
            breakpoint,
            upper: t_param,
        })
    }

    pub fn t_param(&self) -> R {
        self.t_param
    }

    pub fn alpha(&self) -> R {
        self.alpha
    }

    pub fn lower(&self) -> R {
        self.lower
    }

    pub fn breakpoint(&self) -> R {
        self.breakpoint
    }

    pub fn upper(&self) -> R {
        self.upper
    }

    /// The weight at `t`; outside the support this is a domain error.
    pub fn weight(&self, t: R) -> Result<R> {
        if t < self.lower || t > self.upper {
            return Err(Error::domain(format!(
                "t = {t} outside the weight support [{}, {}]",
                self.lower, self.upper
            )));
        }
        let ratio = t / self.t_param;
        if t <= self.breakpoint {
            Ok(R::from_f64(3.0) - ratio)
        } else {
            Ok(R::one() - ratio)
        }
    }

    /// Analytic value of the integral of the weight over its support:
    /// `2 T^{1-alpha} + (T - T^{1-alpha})^2 / (2T)`.
    pub fn weight_integral(&self) -> R {
        let span = self.upper - self.lower;
        (self.breakpoint - self.lower) + (self.breakpoint - self.lower)
            + span * span / (self.t_param + self.t_param)
    }

    /// Classify a frequency by the type boundaries; both boundaries belong
    /// to the lower class.
    pub fn classify(&self, a: R) -> FrequencyClass {
        debug_assert!(a >= R::zero());
        if a <= self.t_param.recip() {
            FrequencyClass::Type1
        } else if a <= self.breakpoint.recip() {
            FrequencyClass::Type2
        } else {
            FrequencyClass::Type3
        }
    }

    /// `integral of t^k w(t) dt` over the support, in closed polynomial form.
    fn weight_moment(&self, k: u32) -> R {
        let k1 = R::from_u64(k as u64 + 1);
        let k2 = R::from_u64(k as u64 + 2);
        let pw = |x: R, e: u32| x.powi(e as i64);
        let a = (pw(self.upper, k + 1) - pw(self.lower, k + 1)) / k1;
        let b = (pw(self.upper, k + 2) - pw(self.lower, k + 2)) / (k2 * self.t_param);
        let c = (pw(self.breakpoint, k + 1) - pw(self.lower, k + 1)) / k1;
        a - b + c + c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyClass {
    Type1,
    Type2,
    Type3,
}

/// Free-standing classification against the `(T, alpha)` boundaries.
pub fn classify_frequency(a: f64, t_param: f64, alpha: f64) -> Result<FrequencyClass> {
    if !(a >= 0.0) {
        return Err(Error::invalid("frequency a must be >= 0"));
    }
    Ok(WeightedKernel::new(t_param, alpha)?.classify(a))
}

/// `integral_0^T cos(at)(1 - t/T) dt = (1 - cos aT)/(a^2 T)`, evaluated in
/// the cancellation-free form `2 sin^2(aT/2)/(a^2 T)`; the `a = 0` limit
/// is `T/2`.
pub fn triangle_cos_integral<R: Real>(a: R, t_param: R) -> Result<R> {
    if a < R::zero() {
        return Err(Error::invalid("frequency a must be >= 0"));
    }
    if a == R::zero() {
        return Ok(t_param / R::from_f64(2.0));
    }
    let s = (a * t_param / R::from_f64(2.0)).sin();
    Ok((s * s + s * s) / (a * a * t_param))
}

/// Closed-form `integral of cos(at) w(t) dt` over the kernel support.
///
/// Three regimes: the exact `a = 0` limit, a Taylor-by-moments series when
/// `a * T <= 1/2` (where the antiderivative difference would cancel
/// catastrophically), and the plain antiderivative difference otherwise.
pub fn weighted_cos_integral<R: Real>(a: R, kernel: &WeightedKernel<R>) -> R {
    debug_assert!(a >= R::zero());
    if a == R::zero() {
        return kernel.weight_integral();
    }
    if a * kernel.upper <= R::from_f64(0.5) {
        // sum_k (-1)^k a^{2k} mu_{2k} / (2k)!
        let a2 = a * a;
        let mut coeff = R::one();
        let mut acc = kernel.weight_moment(0);
        let tol = R::from_f64(10f64.powi(-(R::DIGITS10 as i32 + 2)));
        for k in 1..60u32 {
            coeff = coeff * a2 / R::from_u64((2 * k - 1) as u64 * (2 * k) as u64);
            let term = coeff * kernel.weight_moment(2 * k);
            acc = if k % 2 == 1 { acc - term } else { acc + term };
            if term.abs() <= tol * acc.abs() {
                break;
            }
        }
        return acc;
    }
    let c_u = (a * kernel.upper).cos();
    let (s_l, c_l) = (a * kernel.lower).sin_cos();
    let s_b = (a * kernel.breakpoint).sin();
    let inv_a = a.recip();
    let inv_a2t = (a * a * kernel.t_param).recip();
    let one_minus = R::one() - kernel.lower / kernel.t_param;
    (c_l - c_u) * inv_a2t - s_l * one_minus * inv_a + (s_b - s_l) * inv_a * R::from_f64(2.0)
}

/// `A(t) = sum_k d_k^{it}`: a sum of unit phasors at the representative
/// log frequencies.
pub fn resonator_eval(d: &RepresentativeSet, t: f64) -> Complex64 {
    let td = Dd::from_f64(t);
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for e in d.elements() {
        let (s, c) = (e.log_value() * td).sin_cos_f64();
        re.add(c);
        im.add(s);
    }
    Complex64::new(re.value(), im.value())
}

/// The full-set resonator in product form: `prod_{r<=M} (1 + p_r^{it})`.
pub fn euler_product_eval(m: u32, t: f64) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::invalid("euler product requires M >= 1"));
    }
    let primes = first_m_primes(m as usize)?;
    let td = Dd::from_f64(t);
    let mut acc = Complex64::new(1.0, 0.0);
    for p in primes {
        let (s, c) = (Dd::from_u64(p).ln() * td).sin_cos_f64();
        acc *= Complex64::new(1.0 + c, s);
    }
    Ok(acc)
}

/// Closed form for `integral_0^T |A(t)|^2 dt`:
/// `KT + 2 sum_{k<l} sin(T log(d_l/d_k)) / log(d_l/d_k)`.
pub fn resonator_square_integral(d: &RepresentativeSet, t_param: f64) -> f64 {
    let k_size = d.k();
    let td = Dd::from_f64(t_param);
    let mut acc = CompensatedSum::new();
    acc.add(k_size as f64 * t_param);
    for k in 0..k_size {
        for l in k + 1..k_size {
            let delta = d.elements()[l].log_value() - d.elements()[k].log_value();
            let s = (td * delta).sin();
            acc.add(2.0 * (s / delta).to_f64());
        }
    }
    acc.value()
}

/// Ratio of the square integral to the envelope `11 K T (1 + log K)`;
/// reported, never asserted, at desk scale.
pub fn l2_envelope_ratio(d: &RepresentativeSet, square_integral: f64, t_param: f64) -> f64 {
    let k = d.k() as f64;
    square_integral / (11.0 * k * t_param * (1.0 + k.ln()))
}

/// Per-representative outcome of the resonant-quadruple construction.
#[derive(Clone, Debug)]
pub struct RepResonance {
    pub rep_index: usize,
    pub quadruples: u64,
    /// Quadruples satisfying the construction identity
    /// `m1 * b = n1 * b'` exactly against the flipped element (big-integer
    /// check; must equal `quadruples`).
    pub construction_identities: u64,
    /// Quadruples whose products match the bucket REPRESENTATIVE exactly,
    /// i.e. the flipped element was itself the bucket minimum. Falls short
    /// of `quadruples` exactly when buckets hold several elements.
    pub exact_equalities: u64,
    /// Flips whose partner bucket representative IS the flipped element.
    pub representative_hits: u64,
    /// Quadruples with frequency exceeding `1/T` (expected zero).
    pub frequency_violations: u64,
    /// Quadruples with `m1` or `n1` beyond the `m, n <= T` range.
    pub outside_mn_range: u64,
    /// Summed `(m1 n1)^{-alpha} * wci(a)` over constructed quadruples.
    pub contribution: f64,
    /// `(T/4) * restricted GCD sum` floor this contribution is compared to.
    pub gcd_floor: f64,
}

/// Aggregate report of the resonant-pair construction: for every
/// representative `d_k` and every position-set flip of size `R`, the pair
/// `(m1, n1)` with `m1 b = n1 b'` lands in the resonant class against the
/// representative of `b'`'s bucket.
#[derive(Clone, Debug)]
pub struct ResonantPairReport {
    pub r_used: u32,
    pub r_clamped: bool,
    pub quadruples: u64,
    /// `m1 b = n1 b'` held exactly (expected: every quadruple).
    pub construction_identities: u64,
    /// Products matched the bucket representative exactly.
    pub exact_equalities: u64,
    /// Flips whose partner bucket representative IS the flipped element.
    pub representative_hits: u64,
    /// Quadruples with frequency exceeding `1/T` (expected zero).
    pub frequency_violations: u64,
    /// Quadruples with `m1` or `n1` beyond the `m, n <= T` range.
    pub outside_mn_range: u64,
    /// Minimum over representatives of contribution / gcd_floor.
    pub min_contribution_ratio: f64,
    pub per_rep: Vec<RepResonance>,
}

impl ResonantPairReport {
    pub fn to_json(&self) -> Value {
        json!({
            "R": self.r_used,
            "r_clamped": self.r_clamped,
            "quadruples": self.quadruples,
            "construction_identities": self.construction_identities,
            "exact_equalities": self.exact_equalities,
            "representative_hits": self.representative_hits,
            "frequency_violations": self.frequency_violations,
            "outside_mn_range": self.outside_mn_range,
            "min_contribution_ratio": crate::fmt_g17(self.min_contribution_ratio),
        })
    }
}

/// Run the resonant-quadruple construction over all representatives.
pub fn resonant_pair_check(
    d: &RepresentativeSet,
    alpha: f64,
    caps: &ResourceCaps,
) -> Result<ResonantPairReport> {
    let m = d.m();
    let choice = choose_r(m.max(3), alpha)?;
    let r = choice.clamped();
    let t_param = d.t_param();
    let kernel = WeightedKernel::new(Dd::from_f64(t_param), Dd::from_f64(alpha))?;
    let n_flips = crate::asymptotics::log_binomial_x(m as u64, r as u64)?
        .exp()
        .to_f64();
    if (d.k() as f64) * n_flips > caps.max_enumeration_ops as f64 {
        return Err(Error::refusal(
            "resonant-pair enumeration exceeds the operation cap",
        ));
    }
    let primes = d.primes().to_vec();
    let prime_logs: Vec<Dd> = primes.iter().map(|&p| Dd::from_u64(p).ln()).collect();
    let restricted = restricted_sum_from_primes(&primes, r, alpha);
    let gcd_floor = t_param / 4.0 * restricted;
    let inv_t = Dd::ONE / Dd::from_f64(t_param);
    let mn_max = t_param.floor();

    let flips = position_subsets(m as usize, r as usize);
    let per_rep: Vec<Result<RepResonance>> = (0..d.k())
        .into_par_iter()
        .map(|rep_index| {
            let rep = &d.elements()[rep_index];
            let bits = rep.exponents().bits();
            let mut out = RepResonance {
                rep_index,
                quadruples: 0,
                construction_identities: 0,
                exact_equalities: 0,
                representative_hits: 0,
                frequency_violations: 0,
                outside_mn_range: 0,
                contribution: 0.0,
                gcd_floor,
            };
            let mut contrib = CompensatedSum::new();
            for flip in &flips {
                let flipped_bits = bits ^ flip;
                // m1 = primes added by the flip, n1 = primes removed
                let added = flip & !bits;
                let removed = flip & bits;
                let m1: u128 = mask_product(added, &primes);
                let n1: u128 = mask_product(removed, &primes);
                let partner = resonator_integer_from_mask(flipped_bits, &primes);
                let j = crate::construction::bucket_index(&partner, t_param)?;
                let rep_of = d.rep_of_bucket(j).ok_or_else(|| {
                    Error::ConstructionBug(format!(
                        "bucket {j} of a flipped element has no representative"
                    ))
                })?;
                let partner_rep = &d.elements()[rep_of];
                out.quadruples += 1;
                if m1 as f64 > mn_max || n1 as f64 > mn_max {
                    out.outside_mn_range += 1;
                }
                if partner_rep.exact_value() == partner.exact_value() {
                    out.representative_hits += 1;
                }
                // the construction identity m1 b = n1 b', exactly
                let lhs = rep.exact_value() * BigUint::from(m1);
                if lhs == partner.exact_value() * BigUint::from(n1) {
                    out.construction_identities += 1;
                }
                // exact product equality against the representative
                let rhs = partner_rep.exact_value() * BigUint::from(n1);
                let a = if lhs == rhs {
                    out.exact_equalities += 1;
                    Dd::ZERO
                } else {
                    (mask_log(added, &prime_logs) + rep.log_value()
                        - mask_log(removed, &prime_logs)
                        - partner_rep.log_value())
                    .abs()
                };
                if a > inv_t {
                    out.frequency_violations += 1;
                }
                let wci = weighted_cos_integral(a, &kernel).to_f64();
                let coeff = (-(alpha) * ((m1 as f64).ln() + (n1 as f64).ln())).exp();
                contrib.add(coeff * wci);
            }
            out.contribution = contrib.value();
            Ok(out)
        })
        .collect();
    let per_rep: Vec<RepResonance> = per_rep.into_iter().collect::<Result<_>>()?;

    let quadruples: u64 = per_rep.iter().map(|r| r.quadruples).sum();
    let construction_identities: u64 = per_rep.iter().map(|r| r.construction_identities).sum();
    let exact_equalities: u64 = per_rep.iter().map(|r| r.exact_equalities).sum();
    let representative_hits: u64 = per_rep.iter().map(|r| r.representative_hits).sum();
    let frequency_violations: u64 = per_rep.iter().map(|r| r.frequency_violations).sum();
    let outside_mn_range: u64 = per_rep.iter().map(|r| r.outside_mn_range).sum();
    let min_ratio = per_rep
        .iter()
        .map(|r| r.contribution / r.gcd_floor)
        .fold(f64::INFINITY, f64::min);
    Ok(ResonantPairReport {
        r_used: r,
        r_clamped: choice.asymptotic_regime,
        quadruples,
        construction_identities,
        exact_equalities,
        representative_hits,
        frequency_violations,
        outside_mn_range,
        min_contribution_ratio: min_ratio,
        per_rep,
    })
}

fn mask_product(mask: u32, primes: &[u64]) -> u128 {
    primes
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p as u128)
        .product()
}

fn mask_log(mask: u32, prime_logs: &[Dd]) -> Dd {
    prime_logs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &l)| l)
        .fold(Dd::ZERO, |a, v| a + v)
}

fn position_subsets(m: usize, r: usize) -> Vec<u32> {
    let mut out = Vec::new();
    if r == 0 || r > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.iter().fold(0u32, |acc, &i| acc | 1 << i));
        // next combination
        let mut i = r;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] < m - r + i {
                idx[i] += 1;
                for j in i + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
    }
}

/// The frequency-classified decomposition of the weighted resonance
/// integral's quadruple sum.
#[derive(Clone, Debug)]
pub struct ResonanceDecomposition {
    pub alpha: f64,
    pub t_param: f64,
    pub k_size: usize,
    pub mn_limit: u64,
    pub type1_sum: f64,
    pub type2_sum: f64,
    pub type3_sum: f64,
    /// Accumulated across all quadruples in one stream, independently of
    /// the per-class accumulators; the partition identity compares the
    /// class sums against this.
    pub total: f64,
    pub type1_count: u64,
    pub type2_count: u64,
    pub type3_count: u64,
    pub resonant_pairs: ResonantPairReport,
}

impl ResonanceDecomposition {
    pub fn class_sum_total(&self) -> f64 {
        self.type1_sum + self.type2_sum + self.type3_sum
    }

    pub fn to_json(&self) -> Value {
        let d = crate::fmt_g17;
        json!({
            "params": {
                "alpha": d(self.alpha),
                "T": d(self.t_param),
                "K": self.k_size,
                "mn_limit": self.mn_limit,
            },
            "type1_sum": d(self.type1_sum),
            "type2_sum": d(self.type2_sum),
            "type3_sum": d(self.type3_sum),
            "total": d(self.total),
            "counts": [self.type1_count, self.type2_count, self.type3_count],
            "resonant_pair_report": self.resonant_pairs.to_json(),
        })
    }
}

/// Enumerate all `(k, l, m, n)` with `m, n <= mn_limit`, classify each
/// frequency, and accumulate `(mn)^{-alpha} * wci(a)` per class.
pub fn frequency_decomposition(
    d: &RepresentativeSet,
    alpha: f64,
    mn_limit: u64,
    caps: &ResourceCaps,
) -> Result<ResonanceDecomposition> {
    if mn_limit == 0 {
        return Err(Error::invalid("mn_limit must be >= 1"));
    }
    let k_size = d.k() as u64;
    let ops = k_size * k_size * mn_limit * mn_limit;
    if ops > caps.max_enumeration_ops {
        return Err(Error::refusal(format!(
            "decomposition needs {ops} quadruple operations, cap is {}",
            caps.max_enumeration_ops
        )));
    }
    let t_param = d.t_param();
    let kernel_x = WeightedKernel::new(Dd::from_f64(t_param), Dd::from_f64(alpha))?;
    let kernel_f = WeightedKernel::new(t_param, alpha)?;
    let w_int = kernel_x.weight_integral().to_f64();
    let lns = LnTable::up_to(mn_limit);
    let coeffs: Vec<f64> = (1..=mn_limit).map(|n| (n as f64).powf(-alpha)).collect();
    let taylor_cut = 0.5 / t_param;

    struct ClassAcc {
        sums: [CompensatedSum<f64>; 3],
        counts: [u64; 3],
        total: CompensatedSum<f64>,
    }

    let results: Vec<ClassAcc> = (0..d.k())
        .into_par_iter()
        .map(|k| {
            let mut acc = ClassAcc {
                sums: [CompensatedSum::new(); 3],
                counts: [0; 3],
                total: CompensatedSum::new(),
            };
            let dk = &d.elements()[k];
            for l in 0..d.k() {
                let dl = &d.elements()[l];
                let delta_logs = dk.log_value() - dl.log_value();
                let (dk_u, dl_u) = (dk.value_u128(), dl.value_u128());
                for m in 1..=mn_limit {
                    for n in 1..=mn_limit {
                        let g = m.gcd(&n);
                        let (mr, nr) = (m / g, n / g);
                        let equal = match (dk_u, dl_u) {
                            (Some(a), Some(b)) => match (
                                (mr as u128).checked_mul(a),
                                (nr as u128).checked_mul(b),
                            ) {
                                (Some(x), Some(y)) => x == y,
                                _ => {
                                    BigUint::from(mr) * dk.exact_value()
                                        == BigUint::from(nr) * dl.exact_value()
                                }
                            },
                            _ => {
                                BigUint::from(mr) * dk.exact_value()
                                    == BigUint::from(nr) * dl.exact_value()
                            }
                        };
                        let coeff = coeffs[(m - 1) as usize] * coeffs[(n - 1) as usize];
                        let (class, wci) = if equal {
                            (FrequencyClass::Type1, w_int)
                        } else {
                            let a = (lns.ln(mr) - lns.ln(nr) + delta_logs).abs();
                            let class = kernel_x.classify(a);
                            let wci = if a.to_f64() <= taylor_cut {
                                weighted_cos_integral(a, &kernel_x).to_f64()
                            } else {
                                weighted_cos_integral(a.to_f64(), &kernel_f)
                            };
                            (class, wci)
                        };
                        let idx = match class {
                            FrequencyClass::Type1 => 0,
                            FrequencyClass::Type2 => 1,
                            FrequencyClass::Type3 => 2,
                        };
                        acc.sums[idx].add(coeff * wci);
                        acc.counts[idx] += 1;
                        acc.total.add(coeff * wci);
                    }
                }
            }
            acc
        })
        .collect();

    let mut sums = [CompensatedSum::new(); 3];
    let mut counts = [0u64; 3];
    let mut total = CompensatedSum::new();
    for r in &results {
        for i in 0..3 {
            sums[i].merge(&r.sums[i]);
            counts[i] += r.counts[i];
        }
        total.merge(&r.total);
    }

    let resonant_pairs = resonant_pair_check(d, alpha, caps)?;
    Ok(ResonanceDecomposition {
        alpha,
        t_param,
        k_size: d.k(),
        mn_limit,
        type1_sum: sums[0].value(),
        type2_sum: sums[1].value(),
        type3_sum: sums[2].value(),
        total: total.value(),
        type1_count: counts[0],
        type2_count: counts[1],
        type3_count: counts[2],
        resonant_pairs,
    })
}

/// Tail sum over `m, n <= T` with frequency beyond the type-2 boundary:
/// `sum (mn)^{-alpha} / |log(m d_k / (n d_l))|`.
pub fn type3_tail_sum(
    d_k: &ResonatorInteger,
    d_l: &ResonatorInteger,
    alpha: f64,
    t_param: f64,
    caps: &ResourceCaps,
) -> Result<f64> {
    if t_param > caps.max_tail_t {
        return Err(Error::refusal(format!(
            "tail sum at T = {t_param} exceeds the cap {}",
            caps.max_tail_t
        )));
    }
    if !(t_param >= 2.0) {
        return Err(Error::invalid("tail sum requires T >= 2"));
    }
    let n_limit = t_param.floor() as u64;
    let boundary = Dd::from_f64(2.0 * t_param.powf(1.0 - alpha)).recip();
    let lns = LnTable::up_to(n_limit);
    let coeffs: Vec<f64> = (1..=n_limit).map(|n| (n as f64).powf(-alpha)).collect();
    let delta_logs = d_k.log_value() - d_l.log_value();

    let partials: Vec<CompensatedSum<f64>> = (1..=n_limit)
        .into_par_iter()
        .map(|m| {
            let mut acc = CompensatedSum::new();
            let lm = lns.ln(m) + delta_logs;
            for n in 1..=n_limit {
                let a = (lm - lns.ln(n)).abs();
                if a > boundary {
                    acc.add(coeffs[(m - 1) as usize] * coeffs[(n - 1) as usize] / a.to_f64());
                }
            }
            acc
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for p in &partials {
        acc.merge(p);
    }
    Ok(acc.value())
}

/// Direct quadrature of `integral |zeta_trunc(alpha+it) A(t)|^2 w(t) dt`
/// over the kernel support.
pub fn resonance_integral_quadrature(
    d: &RepresentativeSet,
    alpha: f64,
    caps: &ResourceCaps,
) -> Result<QuadResult> {
    let t_param = d.t_param();
    if t_param > caps.max_quadrature_t {
        return Err(Error::refusal(format!(
            "quadrature at T = {t_param} exceeds the cap {}",
            caps.max_quadrature_t
        )));
    }
    let kernel = WeightedKernel::new(t_param, alpha)?;
    let ev = TruncatedEvaluator::new(alpha, t_param)?;
    let d_max_log = d
        .elements()
        .last()
        .map(|e| e.log_value().to_f64())
        .unwrap_or(0.0);
    let a_max = d_max_log + t_param.ln();
    let f = |t: f64| {
        let z = ev.value_unchecked(t);
        let a = resonator_eval(d, t);
        let w = kernel.weight(t).unwrap_or(0.0);
        (z * a).norm_sqr() * w
    };
    // the weight jumps at the breakpoint; integrate the smooth pieces
    // separately, panel width at most pi/(8 a_max)
    let left = adaptive_oscillatory(&f, kernel.lower(), kernel.breakpoint(), 4.0 * a_max, 1e-4, 0.0)?;
    let right = adaptive_oscillatory(&f, kernel.breakpoint(), kernel.upper(), 4.0 * a_max, 1e-4, 0.0)?;
    Ok(QuadResult {
        value: left.value + right.value,
        est_error: left.est_error + right.est_error,
        panels: left.panels + right.panels,
    })
}

/// Grid report for the closed-form bound checks.
#[derive(Clone, Debug)]
pub struct GridBoundReport {
    pub points: usize,
    pub violations: u64,
    /// Most negative margin observed (bound minus value, or value minus
    /// floor, depending on the check); nonnegative means all points pass.
    pub worst_margin: f64,
}

/// Check `wci(a) >= -1e-12 T` on a geometric grid over the type-2 range.
pub fn verify_type2_nonnegativity(
    alpha: f64,
    t_param: f64,
    points: usize,
) -> Result<GridBoundReport> {
    let kernel = WeightedKernel::new(Dd::from_f64(t_param), Dd::from_f64(alpha))?;
    let lo = 1.0 / t_param;
    let hi = 1.0 / (2.0 * t_param.powf(1.0 - alpha));
    let floor = -1e-12 * t_param;
    let ratio = (hi / lo).powf(1.0 / points as f64);
    let mut violations = 0;
    let mut worst: f64 = f64::INFINITY;
    for i in 1..=points {
        let a = lo * ratio.powi(i as i32);
        let v = weighted_cos_integral(Dd::from_f64(a), &kernel).to_f64();
        worst = worst.min(v - floor);
        if v < floor {
            violations += 1;
        }
    }
    Ok(GridBoundReport {
        points,
        violations,
        worst_margin: worst,
    })
}

/// Check `|wci(a)| <= 7/a` for `a >= 1/T` on a geometric grid up to `a_max`.
pub fn verify_seven_over_a_bound(
    alpha: f64,
    t_param: f64,
    points: usize,
    a_max: f64,
) -> Result<GridBoundReport> {
    let kernel = WeightedKernel::new(Dd::from_f64(t_param), Dd::from_f64(alpha))?;
    let lo = 1.0 / t_param;
    let ratio = (a_max / lo).powf(1.0 / points as f64);
    let mut violations = 0;
    let mut worst: f64 = f64::INFINITY;
    for i in 0..=points {
        let a = lo * ratio.powi(i as i32);
        let v = weighted_cos_integral(Dd::from_f64(a), &kernel).to_f64();
        let margin = 7.0 / a - v.abs();
        worst = worst.min(margin);
        if margin < 0.0 {
            violations += 1;
        }
    }
    Ok(GridBoundReport {
        points,
        violations,
        worst_margin: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_b, build_d};
    use crate::quadrature::composite_gl7;
    use rand::Rng;
    use rand::SeedableRng;

    fn caps() -> ResourceCaps {
        ResourceCaps::default()
    }

    fn kernel64(t: f64, alpha: f64) -> WeightedKernel<f64> {
        WeightedKernel::new(t, alpha).unwrap()
    }

    #[test]
    fn weight_examples() {
        let k = kernel64(1e4, 0.75);
        // t = T: w = 0
        assert!(k.weight(1e4).unwrap().abs() < 1e-15);
        // t = T^{1-alpha}: w = 3 - T^{-alpha}
        let w = k.weight(10.0).unwrap();
        assert!((w - (3.0 - 1e-3)).abs() < 1e-12);
        // jump at the breakpoint equals 2
        let b = k.breakpoint();
        let left = k.weight(b).unwrap();
        let right = k.weight(b + 1e-9).unwrap();
        assert!((left - right - 2.0).abs() < 1e-6);
        assert!(k.weight(9.0).is_err());
        assert!(k.weight(1e4 + 1.0).is_err());
    }

    #[test]
    fn kernel_rejects_too_small_t() {
        // needs 2 T^{1-alpha} <= T
        assert!(WeightedKernel::new(2.5, 0.51).is_err());
        assert!(WeightedKernel::new(16.0, 0.75).is_ok());
    }

    #[test]
    fn classify_boundaries() {
        // T = 1e4, alpha = 3/4: boundaries 1e-4 and 0.05
        let k = kernel64(1e4, 0.75);
        assert_eq!(k.classify(0.0), FrequencyClass::Type1);
        assert_eq!(k.classify(1e-4), FrequencyClass::Type1);
        assert_eq!(k.classify(1.0001e-4), FrequencyClass::Type2);
        assert_eq!(k.classify(0.01), FrequencyClass::Type2);
        assert_eq!(k.classify(0.05), FrequencyClass::Type2);
        assert_eq!(k.classify(0.050001), FrequencyClass::Type3);
        assert_eq!(k.classify(1.0), FrequencyClass::Type3);
        assert_eq!(
            classify_frequency(1.0, 100.0, 0.6).unwrap(),
            FrequencyClass::Type3
        );
        assert!(classify_frequency(-0.5, 100.0, 0.6).is_err());
    }

    #[test]
    fn triangle_integral_special_values() {
        // aT = 2 pi: zero
        let t = 10.0;
        let a = std::f64::consts::TAU / t;
        assert!(triangle_cos_integral(a, t).unwrap().abs() < 1e-16);
        // aT = pi: 2/(a^2 T)
        let a = std::f64::consts::PI / t;
        let want = 2.0 / (a * a * t);
        assert!((triangle_cos_integral(a, t).unwrap() - want).abs() < 1e-13);
        // a = 0 limit
        assert_eq!(triangle_cos_integral(0.0, 8.0).unwrap(), 4.0);
        assert!(triangle_cos_integral(-1.0, 8.0).is_err());
        // nonnegative everywhere on a grid
        for i in 1..2000 {
            let a = i as f64 * 0.37e-2;
            assert!(triangle_cos_integral(a, 210.0).unwrap() >= 0.0);
        }
        // anchor: (1 - cos(aT))/(a^2 T) at a = 0.37, T = 210
        let got = triangle_cos_integral(0.37, 210.0).unwrap();
        assert!((got - 0.05800548109251933).abs() < 1e-15);
    }

    #[test]
    fn triangle_integral_matches_quadrature() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let a = 10f64.powf(rng.gen_range(-4.0..1.0));
            let t = 10f64.powf(rng.gen_range(1.0..3.0));
            let f = |x: f64| (a * x).cos() * (1.0 - x / t);
            let panels = (((a * t).ceil() as usize) * 2).max(32);
            let quad = composite_gl7(&f, 0.0, t, panels);
            let closed = triangle_cos_integral(a, t).unwrap();
            // a small absolute floor covers near-zeros of the closed form
            // (aT near 2 pi k), where relative agreement is ill-posed
            assert!(
                (quad - closed).abs() <= 1e-8 * closed.abs() + 1e-11 * t,
                "a={a} t={t}: {quad} vs {closed}"
            );
        }
    }

    /// Quadrature oracle for the weighted integral, split at the
    /// breakpoint where the weight jumps.
    fn wci_quadrature(a: f64, k: &WeightedKernel<f64>, per_osc: f64) -> f64 {
        let f = |x: f64| (a * x).cos() * k.weight(x).unwrap();
        let mut total = 0.0;
        for (lo, hi) in [(k.lower(), k.breakpoint()), (k.breakpoint(), k.upper())] {
            let osc = (a * (hi - lo) / std::f64::consts::TAU).ceil();
            let panels = ((osc * per_osc) as usize).clamp(64, 1 << 17);
            total += composite_gl7(&f, lo, hi, panels);
        }
        total
    }

    #[test]
    fn weighted_integral_zero_frequency_is_weight_integral() {
        for (t, alpha) in [(1e4, 0.9), (1e3, 0.75), (100.0, 0.6)] {
            let k = kernel64(t, alpha);
            let direct = composite_gl7(&|x| k.weight(x).unwrap(), k.lower(), k.breakpoint(), 512)
                + composite_gl7(&|x| k.weight(x).unwrap(), k.breakpoint(), k.upper(), 4096);
            assert!(
                (k.weight_integral() - direct).abs() < 1e-9 * direct.abs(),
                "t={t} alpha={alpha}"
            );
            assert_eq!(weighted_cos_integral(0.0, &k), k.weight_integral());
        }
        // anchor: T=1e4, alpha=0.9 -> 5002.51220191018182...
        let k = kernel64(1e4, 0.9);
        assert!((k.weight_integral() - 5002.512201910182).abs() < 1e-9);
    }

    #[test]
    fn weighted_integral_matches_quadrature_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let alpha = rng.gen_range(0.55..0.95);
            let t: f64 = 10f64.powf(rng.gen_range(1.5..4.0));
            let a = 10f64.powf(rng.gen_range(-6.0..1.0));
            let k = kernel64(t, alpha);
            let quad = wci_quadrature(a, &k, 8.0);
            let closed = weighted_cos_integral(a, &k);
            let closed_x =
                weighted_cos_integral(Dd::from_f64(a), &kernel64x(t, alpha)).to_f64();
            // absolute floor covers accidental zeros of the integral
            let tol = 1e-8 * closed_x.abs() + 1e-10 * t;
            assert!(
                (quad - closed_x).abs() <= tol,
                "a={a} t={t} alpha={alpha}: {quad} vs {closed_x}"
            );
            // f64 and Dd instantiations agree to f64 roundoff levels
            assert!(
                (closed - closed_x).abs() <= tol,
                "a={a} t={t} alpha={alpha}: f64 {closed} vs dd {closed_x}"
            );
        }
    }

    fn kernel64x(t: f64, alpha: f64) -> WeightedKernel<Dd> {
        WeightedKernel::new(Dd::from_f64(t), Dd::from_f64(alpha)).unwrap()
    }

    #[test]
    fn weighted_integral_branches_agree_with_quadrature_near_cut() {
        // both sides of the Taylor/closed-form switch sit on the same curve
        let t = 1e4;
        let kx = kernel64x(t, 0.75);
        let kf = kernel64(t, 0.75);
        let cut = 0.5 / t;
        for factor in [0.2, 0.9, 0.999, 1.001, 1.4, 8.0] {
            let a = cut * factor;
            let closed = weighted_cos_integral(Dd::from_f64(a), &kx).to_f64();
            let quad = wci_quadrature(a, &kf, 16.0);
            assert!(
                (closed - quad).abs() < 1e-8 * closed.abs().max(t),
                "factor {factor}: {closed} vs {quad}"
            );
        }
        // anchor at the cut itself (Taylor side):
        // a=5e-5, T=1e4, alpha=3/4 -> 4906.70251896811249...
        let v = weighted_cos_integral(Dd::from_f64(5e-5), &kx).to_f64();
        assert!((v - 4906.702518968112).abs() < 1e-8, "{v}");
        // spot anchor: a=0.001, T=1000, alpha=0.75 -> 465.336533356051217...
        let k = kernel64x(1e3, 0.75);
        let v = weighted_cos_integral(Dd::from_f64(1e-3), &k).to_f64();
        assert!((v - 465.3365333560512).abs() < 1e-9, "{v}");
        // a=0.5, T=1000 -> -4.39196394455264679...
        let v = weighted_cos_integral(Dd::from_f64(0.5), &k).to_f64();
        assert!((v + 4.391963944552647).abs() < 1e-10, "{v}");
        // a=2, T=100, alpha=0.6 -> 0.029171748136039160...
        let k = kernel64x(100.0, 0.6);
        let v = weighted_cos_integral(Dd::from_f64(2.0), &k).to_f64();
        assert!((v - 0.02917174813603916).abs() < 1e-12, "{v}");
    }

    #[test]
    fn type1_band_integrals_stay_above_cos1_share() {
        // for a <= 1/T the integrand never drops below cos(1) w(t)
        let cos1 = 1f64.cos();
        for (t, alpha) in [(1e3, 0.75), (1e4, 0.6)] {
            let k = kernel64x(t, alpha);
            let w_int = k.weight_integral().to_f64();
            for i in 0..=100 {
                let a = i as f64 / 100.0 / t;
                let v = weighted_cos_integral(Dd::from_f64(a), &k).to_f64();
                assert!(v >= cos1 * w_int - 1e-9, "a={a}: {v} < {}", cos1 * w_int);
            }
        }
    }

    #[test]
    fn type2_nonnegativity_and_seven_over_a() {
        for (t, alpha) in [(1e3, 0.75), (1e4, 0.9)] {
            let rep = verify_type2_nonnegativity(alpha, t, 2000).unwrap();
            assert_eq!(rep.violations, 0, "{rep:?}");
            let rep = verify_seven_over_a_bound(alpha, t, 2000, 1e3).unwrap();
            assert_eq!(rep.violations, 0, "{rep:?}");
        }
    }

    #[test]
    fn resonator_eval_basics() {
        let b = build_b(3, &caps()).unwrap();
        let d = build_d(&b, 1e4).unwrap();
        let k = d.k() as f64;
        // t = 0: exactly K
        let v0 = resonator_eval(&d, 0.0);
        assert!((v0.re - k).abs() < 1e-12 && v0.im.abs() < 1e-12);
        // |A(t)| <= K on a grid
        for i in 0..500 {
            let t = i as f64 * 7.3;
            assert!(resonator_eval(&d, t).norm() <= k + 1e-9);
        }
    }

    #[test]
    fn two_element_resonator_closed_form() {
        // D = {1, 2}: |A(t)|^2 = 2 + 2 cos(t ln 2)
        let b = build_b(1, &caps()).unwrap();
        let d = build_d(&b, 100.0).unwrap();
        assert_eq!(d.k(), 2);
        for i in 0..100 {
            let t = i as f64 * 0.61;
            let got = resonator_eval(&d, t).norm_sqr();
            let want = 2.0 + 2.0 * (t * std::f64::consts::LN_2).cos();
            assert!((got - want).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn euler_product_matches_bruteforce_sum() {
        let b = build_b(3, &caps()).unwrap();
        let t = 1.7;
        let want: Complex64 = b
            .elements()
            .iter()
            .map(|e| {
                let (s, c) = (e.log_value() * Dd::from_f64(t)).sin_cos_f64();
                Complex64::new(c, s)
            })
            .sum();
        let got = euler_product_eval(3, t).unwrap();
        assert!((got - want).norm() < 1e-10);
        // anchor from an independent evaluation
        assert!((got.re - (-0.7717906351346650)).abs() < 1e-12);
        assert!((got.im - 0.1975431874862165).abs() < 1e-12);
        // t = 0: 2^M exactly; modulus bounded by 2^M on a grid
        assert!((euler_product_eval(5, 0.0).unwrap().re - 32.0).abs() < 1e-12);
        for i in 0..200 {
            assert!(euler_product_eval(5, i as f64 * 3.3).unwrap().norm() <= 32.0 + 1e-9);
        }
    }

    #[test]
    fn square_integral_two_elements_anchor() {
        // D = {1,2}, T = 10: 20 + 2 sin(10 ln 2)/ln 2 = 21.7422603569680071...
        let b = build_b(1, &caps()).unwrap();
        let d = build_d(&b, 10.0).unwrap();
        assert_eq!(d.k(), 2);
        let got = resonator_square_integral(&d, 10.0);
        assert!((got - 21.742260356968007).abs() < 1e-12, "{got}");
    }

    #[test]
    fn square_integral_matches_quadrature() {
        let b = build_b(4, &caps()).unwrap();
        let d = build_d(&b, 1e4).unwrap();
        let t_param = 500.0;
        let closed = resonator_square_integral(&d, t_param);
        let f = |t: f64| resonator_eval(&d, t).norm_sqr();
        let a_max = d.elements().last().unwrap().log_value().to_f64();
        let q = adaptive_oscillatory(&f, 0.0, t_param, 4.0 * a_max, 1e-9, 0.0).unwrap();
        assert!(
            (q.value - closed).abs() <= 1e-6 * closed.abs(),
            "{} vs {closed}",
            q.value
        );
        // triangle bound and envelope ratio
        let k = d.k() as f64;
        assert!(closed <= k * k * t_param);
        let ratio = l2_envelope_ratio(&d, closed, t_param);
        assert!(ratio > 0.0 && ratio.is_finite());
    }

    #[test]
    fn decomposition_trivial_singleton() {
        // mn_limit = 1 restricts to the pure diagonal plus the cross pair
        let b = build_b(1, &caps()).unwrap();
        let d = build_d(&b, 100.0).unwrap();
        let dec = frequency_decomposition(&d, 0.75, 1, &caps()).unwrap();
        let k = WeightedKernel::new(100.0f64, 0.75).unwrap();
        // quadruples: (k,l,1,1) for k,l in {1,2}: diagonal pairs give w_int,
        // the cross pair frequency is ln 2 (type 3 at T=100)
        assert_eq!(dec.type1_count, 2);
        assert!((dec.type1_sum - 2.0 * k.weight_integral()).abs() < 1e-9);
        assert_eq!(dec.type3_count, 2);
    }

    #[test]
    fn decomposition_partition_identity() {
        let b = build_b(3, &caps()).unwrap();
        let d = build_d(&b, 50.0).unwrap();
        let dec = frequency_decomposition(&d, 0.75, 20, &caps()).unwrap();
        let lhs = dec.class_sum_total();
        assert!(
            (lhs - dec.total).abs() <= 1e-6 * dec.total.abs().max(1.0),
            "{lhs} vs {}",
            dec.total
        );
        let quadruples = dec.type1_count + dec.type2_count + dec.type3_count;
        assert_eq!(quadruples, (d.k() as u64 * 20).pow(2));
        // diagonal terms alone put K * w_int into type 1
        let k = WeightedKernel::new(50.0f64, 0.75).unwrap();
        assert!(dec.type1_sum >= d.k() as f64 * k.weight_integral() * 0.9);
    }

    #[test]
    fn decomposition_respects_cap() {
        let b = build_b(3, &caps()).unwrap();
        let d = build_d(&b, 50.0).unwrap();
        let mut c = caps();
        c.max_enumeration_ops = 10;
        assert!(matches!(
            frequency_decomposition(&d, 0.75, 20, &c),
            Err(Error::ResourceRefusal(_))
        ));
    }

    #[test]
    fn resonant_pairs_exact_and_within_band() {
        // M = 6, T = 2^{2M} at alpha = 3/4
        let b = build_b(6, &caps()).unwrap();
        let t_param = (2f64).powi(12);
        let d = build_d(&b, t_param).unwrap();
        let rep = resonant_pair_check(&d, 0.75, &caps()).unwrap();
        assert_eq!(rep.frequency_violations, 0);
        assert_eq!(rep.outside_mn_range, 0);
        assert!(rep.quadruples > 0);
        // the per-representative contribution clears the (T/4) floor
        assert!(
            rep.min_contribution_ratio >= 1.0,
            "min ratio {}",
            rep.min_contribution_ratio
        );
    }

    #[test]
    fn type3_tail_symmetric_and_positive() {
        let b = build_b(2, &caps()).unwrap();
        let e3 = b
            .elements()
            .iter()
            .find(|e| e.value_u128() == Some(3))
            .unwrap();
        let e2 = b
            .elements()
            .iter()
            .find(|e| e.value_u128() == Some(2))
            .unwrap();
        let v1 = type3_tail_sum(e3, e2, 0.75, 300.0, &caps()).unwrap();
        let v2 = type3_tail_sum(e2, e3, 0.75, 300.0, &caps()).unwrap();
        assert!(v1 > 0.0);
        assert!((v1 - v2).abs() < 1e-9 * v1);
        assert!(matches!(
            type3_tail_sum(e2, e3, 0.75, 5000.0, &caps()),
            Err(Error::ResourceRefusal(_))
        ));
    }

    #[test]
    fn type3_tail_matches_naive_double_loop() {
        let b = build_b(1, &caps()).unwrap();
        let one = &b.elements()[0];
        let t_param = 100.0;
        let alpha = 0.75;
        let got = type3_tail_sum(one, one, alpha, t_param, &caps()).unwrap();
        // naive oracle in plain f64
        let boundary = 1.0 / (2.0 * t_param.powf(1.0 - alpha));
        let mut want = 0.0;
        for m in 1..=100u64 {
            for n in 1..=100u64 {
                let a = ((m as f64).ln() - (n as f64).ln()).abs();
                if a > boundary {
                    want += (m as f64 * n as f64).powf(-alpha) / a;
                }
            }
        }
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn quadrature_route_matches_decomposition_total() {
        // with mn_limit = floor(T) the quadruple sum IS the integral of
        // |zeta_trunc A|^2 w; two independent routes to the same number
        let b = build_b(3, &caps()).unwrap();
        let d = build_d(&b, 50.0).unwrap();
        let dec = frequency_decomposition(&d, 0.75, 50, &caps()).unwrap();
        let quad = resonance_integral_quadrature(&d, 0.75, &caps()).unwrap();
        let rel = (dec.total - quad.value).abs() / quad.value.abs();
        assert!(rel < 2e-4, "decomposition {} vs quadrature {}", dec.total, quad.value);
        assert!(quad.value > 0.0);
    }
}
