//! The multiplicative resonator set `B`, the Hamming distance on exponent
//! vectors, the geometric ratio buckets, and the representative set `D`.
//!
//! `B` consists of all `2^M` square-free products of the first `M` primes.
//! Buckets partition the positive reals into intervals of ratio `1 + 1/T`;
//! `D` keeps the minimum of every non-empty bucket, which separates the
//! resonator frequencies by at least `log(1 + 1/T)`. All equality and
//! near-tie decisions go through exact integer arithmetic; logarithms are
//! carried at extended precision because ratios arbitrarily close to 1 are
//! precisely the hazard this construction exists to control.

use crate::asymptotics::ln_biguint;
use crate::caps::ResourceCaps;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::primes::first_m_primes;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Exponent pattern of a square-free product of the first `M` primes,
/// packed into a bit mask (bit `r` set means `p_{r+1}` divides the value).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    bits: u32,
    len: u8,
}

impl ExponentVector {
    pub fn new(bits: u32, len: u8) -> ExponentVector {
        debug_assert!(len <= 32 && (len == 32 || bits < (1u32 << len)));
        ExponentVector { bits, len }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn bit(&self, r: usize) -> bool {
        debug_assert!(r < self.len as usize);
        self.bits >> r & 1 == 1
    }

    pub fn to_digits(&self) -> Vec<u8> {
        (0..self.len as usize).map(|r| self.bit(r) as u8).collect()
    }

    pub fn popcount(&self) -> u32 {
        self.bits.count_ones()
    }
}

/// Hamming distance between two exponent vectors: the number of primes
/// dividing exactly one of the two values.
pub fn delta(u: &ExponentVector, v: &ExponentVector) -> Result<u32> {
    if u.len != v.len {
        return Err(Error::invalid("exponent vectors must have equal length"));
    }
    Ok((u.bits ^ v.bits).count_ones())
}

/// Componentwise minimum: the exponent vector of `gcd(b_u, b_v)`.
pub fn gcd_exponents(u: &ExponentVector, v: &ExponentVector) -> Result<ExponentVector> {
    if u.len != v.len {
        return Err(Error::invalid("exponent vectors must have equal length"));
    }
    Ok(ExponentVector::new(u.bits & v.bits, u.len))
}

/// One element of `B`: its exponent pattern, exact integer value, and
/// natural log at extended precision (absolute error well below 1e-25).
#[derive(Clone, Debug)]
pub struct ResonatorInteger {
    exponents: ExponentVector,
    log_value: Dd,
    exact_value: BigUint,
    /// Exact value when it fits 128 bits (fast path for products).
    value_u128: Option<u128>,
}

impl ResonatorInteger {
    fn build(mask: u32, m: u8, primes: &[u64], prime_logs: &[Dd]) -> ResonatorInteger {
        let mut exact = BigUint::from(1u32);
        let mut log = Dd::ZERO;
        for (r, (&p, &lp)) in primes.iter().zip(prime_logs).enumerate() {
            if mask >> r & 1 == 1 {
                exact *= p;
                log += lp;
            }
        }
        let value_u128 = (exact.bits() <= 127).then(|| {
            let mut v = 0u128;
            for (i, d) in exact.iter_u64_digits().enumerate() {
                v |= (d as u128) << (64 * i);
            }
            v
        });
        ResonatorInteger {
            exponents: ExponentVector::new(mask, m),
            log_value: log,
            exact_value: exact,
            value_u128,
        }
    }

    pub fn exponents(&self) -> &ExponentVector {
        &self.exponents
    }

    pub fn log_value(&self) -> Dd {
        self.log_value
    }

    pub fn exact_value(&self) -> &BigUint {
        &self.exact_value
    }

    pub fn value_u128(&self) -> Option<u128> {
        self.value_u128
    }

    pub fn is_one(&self) -> bool {
        self.exponents.bits == 0
    }
}

/// Build a single set element from its exponent mask over the given
/// primes (used when walking neighbors of a representative without
/// materializing all of `B`).
pub fn resonator_integer_from_mask(mask: u32, primes: &[u64]) -> ResonatorInteger {
    let prime_logs: Vec<Dd> = primes.iter().map(|&p| Dd::from_u64(p).ln()).collect();
    ResonatorInteger::build(mask, primes.len() as u8, primes, &prime_logs)
}

/// The set `B`: all `2^M` square-free products of the first `M` primes,
/// sorted ascending by exact value.
#[derive(Clone, Debug)]
pub struct MultiplicativeSet {
    m: u32,
    primes: Vec<u64>,
    elements: Vec<ResonatorInteger>,
}

impl MultiplicativeSet {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn elements(&self) -> &[ResonatorInteger] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Map from exponent mask to index in the sorted element list.
    pub fn index_by_exponents(&self) -> std::collections::HashMap<u32, usize> {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.exponents.bits, i))
            .collect()
    }

    pub fn to_json(&self, alpha: Option<f64>) -> Value {
        let mut doc = json!({
            "M": self.m,
            "primes": self.primes,
            "elements": elements_json(&self.elements),
        });
        if let Some(a) = alpha {
            doc["alpha"] = json!(a);
        }
        doc
    }
}

fn elements_json(elements: &[ResonatorInteger]) -> Value {
    Value::Array(
        elements
            .iter()
            .map(|e| {
                json!({
                    "bits": e.exponents.to_digits(),
                    "log_value_decimal_string": e.log_value.to_decimal_string(31),
                    "exact_value_decimal_string": e.exact_value.to_string(),
                })
            })
            .collect(),
    )
}

/// `M = ceil((2 alpha - 1) log2 T)`.
pub fn choose_m(t_param: f64, alpha: f64) -> Result<u32> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in the open interval (1/2, 1)"));
    }
    if !(t_param >= 16.0) {
        return Err(Error::invalid("T must be >= 16"));
    }
    let log2_t = Dd::from_f64(t_param).ln() / Dd::LN_2;
    let raw = Dd::from_f64(2.0 * alpha - 1.0) * log2_t;
    Ok(snap_ceil(raw).max(1) as u32)
}

/// Chosen `R` together with a flag marking the degenerate regime where the
/// formula floors to zero (small `M`; consumers clamp to 1 and propagate
/// the flag).
#[derive(Clone, Copy, Debug)]
pub struct RChoice {
    pub r: u32,
    /// True when the formula value was below 1 (asymptotic regime not
    /// reached at this `M`).
    pub asymptotic_regime: bool,
}

impl RChoice {
    /// `R` clamped to at least 1, the value downstream lemma checks use.
    pub fn clamped(&self) -> u32 {
        self.r.max(1)
    }
}

/// `R = floor(M^{1-alpha} / (e (ln M + ln ln M)^alpha))`.
pub fn choose_r(m: u32, alpha: f64) -> Result<RChoice> {
    if m < 3 {
        return Err(Error::domain("choose_r requires M >= 3"));
    }
    let mf = Dd::from_u64(m as u64);
    let a = Dd::from_f64(alpha);
    let ln_m = mf.ln();
    let x = ln_m + ln_m.ln();
    let raw = mf.powf(Dd::ONE - a) / (Dd::E * x.powf(a));
    let r = snap_floor(raw).max(0) as u32;
    Ok(RChoice {
        r,
        asymptotic_regime: r == 0,
    })
}

fn snap_ceil(x: Dd) -> i64 {
    let nearest = x.round();
    if (x - nearest).abs() < Dd::from_f64(1e-25) {
        nearest.to_f64() as i64
    } else {
        x.ceil().to_f64() as i64
    }
}

fn snap_floor(x: Dd) -> i64 {
    let nearest = x.round();
    if (x - nearest).abs() < Dd::from_f64(1e-25) {
        nearest.to_f64() as i64
    } else {
        x.floor().to_f64() as i64
    }
}

/// Enumerate all of `B` for the first `m` primes, sorted ascending.
pub fn build_b(m: u32, caps: &ResourceCaps) -> Result<MultiplicativeSet> {
    if m == 0 {
        return Err(Error::invalid("M must be >= 1"));
    }
    if m > caps.max_exact_m {
        return Err(Error::refusal(format!(
            "M = {m} exceeds the exact-materialization cap {}",
            caps.max_exact_m
        )));
    }
    let primes = first_m_primes(m as usize)?;
    let prime_logs: Vec<Dd> = primes.iter().map(|&p| Dd::from_u64(p).ln()).collect();
    let mut elements: Vec<ResonatorInteger> = (0u32..1u32 << m)
        .map(|mask| ResonatorInteger::build(mask, m as u8, &primes, &prime_logs))
        .collect();
    elements.sort_by(|a, b| a.exact_value.cmp(&b.exact_value));
    Ok(MultiplicativeSet {
        m,
        primes,
        elements,
    })
}

/// Bucket index `j` such that `(1+1/T)^{j-1} <= b < (1+1/T)^j`.
///
/// Computed in extended precision; when the log-domain position lands
/// within 2 ulps of a bucket boundary the decision is replayed with exact
/// integer arithmetic (possible whenever `T` is integral).
pub fn bucket_index(b: &ResonatorInteger, t_param: f64) -> Result<u128> {
    if !(t_param >= 2.0) {
        return Err(Error::invalid("bucket_index requires T >= 2"));
    }
    if b.is_one() {
        return Ok(1);
    }
    let ln_ratio = (Dd::ONE / Dd::from_f64(t_param)).ln_1p();
    let y = b.log_value / ln_ratio;
    let fl = y.floor();
    let frac = y - fl;
    let near_low = frac < Dd::from_f64(1e-22);
    let near_high = (Dd::ONE - frac) < Dd::from_f64(1e-22);
    if near_low || near_high {
        let k = if near_low {
            fl.to_u128_floor()
        } else {
            (fl + Dd::ONE).to_u128_floor()
        }
        .ok_or_else(|| Error::domain("bucket index out of range"))?;
        // decide b >= (1+1/T)^k, i.e. b * T^k >= (T+1)^k, exactly
        if t_param.fract() == 0.0 && t_param <= 9.0e15 {
            let t_int = BigUint::from(t_param as u64);
            let t1_int = &t_int + 1u32;
            let lhs = b.exact_value.clone() * t_int.pow(k as u32);
            let rhs = t1_int.pow(k as u32);
            return Ok(if lhs >= rhs { k + 1 } else { k });
        }
        // non-integral T: fall through to the extended-precision verdict
    }
    fl.to_u128_floor()
        .map(|j| j + 1)
        .ok_or_else(|| Error::domain("bucket index out of range"))
}

/// The representative set `D`: the minimum of every non-empty bucket,
/// sorted ascending, with its bucket indices.
#[derive(Clone, Debug)]
pub struct RepresentativeSet {
    t_param: f64,
    primes: Vec<u64>,
    m: u32,
    elements: Vec<ResonatorInteger>,
    bucket_indices: Vec<u128>,
    bucket_to_rep: BTreeMap<u128, usize>,
    multi_element_buckets: usize,
}

impl RepresentativeSet {
    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn t_param(&self) -> f64 {
        self.t_param
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn elements(&self) -> &[ResonatorInteger] {
        &self.elements
    }

    /// Bucket index of the i-th representative.
    pub fn bucket_of(&self, i: usize) -> u128 {
        self.bucket_indices[i]
    }

    /// Index of the representative owning bucket `j`, if that bucket is
    /// non-empty.
    pub fn rep_of_bucket(&self, j: u128) -> Option<usize> {
        self.bucket_to_rep.get(&j).copied()
    }

    /// Number of buckets that contained more than one element of `B`
    /// (measured empirically; whether this occurs at large `M` is open).
    pub fn multi_element_buckets(&self) -> usize {
        self.multi_element_buckets
    }

    pub fn to_json(&self, alpha: Option<f64>) -> Value {
        let buckets: Vec<Value> = self
            .bucket_indices
            .iter()
            .enumerate()
            .map(|(i, j)| {
                json!({
                    "j": j.to_string(),
                    "representative_index": i,
                })
            })
            .collect();
        let mut doc = json!({
            "M": self.m,
            "T": self.t_param,
            "primes": self.primes,
            "elements": elements_json(&self.elements),
            "buckets": buckets,
        });
        if let Some(a) = alpha {
            doc["alpha"] = json!(a);
        }
        doc
    }
}

/// Select the bucket minima of `B`. Deterministic: identical `(B, T)`
/// yield identical `D`.
pub fn build_d(b: &MultiplicativeSet, t_param: f64) -> Result<RepresentativeSet> {
    if !(t_param >= 2.0) {
        return Err(Error::invalid("build_d requires T >= 2"));
    }
    let mut first_in_bucket: BTreeMap<u128, usize> = BTreeMap::new();
    let mut occupancy: BTreeMap<u128, usize> = BTreeMap::new();
    for (i, e) in b.elements.iter().enumerate() {
        let j = bucket_index(e, t_param)?;
        first_in_bucket.entry(j).or_insert(i); // elements ascend, first = min
        *occupancy.entry(j).or_insert(0) += 1;
    }
    let multi = occupancy.values().filter(|&&c| c > 1).count();
    let mut elements = Vec::with_capacity(first_in_bucket.len());
    let mut bucket_indices = Vec::with_capacity(first_in_bucket.len());
    let mut bucket_to_rep = BTreeMap::new();
    for (j, idx) in &first_in_bucket {
        bucket_to_rep.insert(*j, elements.len());
        elements.push(b.elements[*idx].clone());
        bucket_indices.push(*j);
    }
    Ok(RepresentativeSet {
        t_param,
        primes: b.primes.clone(),
        m: b.m,
        elements,
        bucket_indices,
        bucket_to_rep,
        multi_element_buckets: multi,
    })
}

/// Per-pair findings of the distance-restricted separation check.
#[derive(Clone, Debug, Default)]
pub struct SeparationReport {
    pub m: u32,
    pub r: u32,
    pub t_param: f64,
    pub pairs_in_distance_range: u64,
    /// Pairs whose reduced denominator exceeds `(M(ln M + ln ln M))^{2R}`.
    pub denominator_violations: u64,
    /// Whether the chain applies at these parameters, i.e. the denominator
    /// bound is itself below `sqrt(T)`.
    pub chain_applies: bool,
    /// Pairs violating `ratio >= 1 + 1/sqrt(T)` (only checked when the
    /// chain applies).
    pub ratio_violations: u64,
    /// Pairs within distance `2R` that nevertheless share a bucket (the
    /// lemma's conclusion says there are none for large `T`).
    pub same_bucket_violations: u64,
    /// Smallest ratio `b_max/b_min` over the checked pairs.
    pub min_ratio: f64,
    /// Example violating pairs (element indices into `B`), capped.
    pub examples: Vec<(usize, usize)>,
}

impl SeparationReport {
    pub fn is_clean(&self) -> bool {
        self.denominator_violations == 0
            && self.ratio_violations == 0
            && self.same_bucket_violations == 0
    }
}

/// Check, for all pairs with `1 <= delta <= 2R`, the reduced-denominator
/// bound and the ratio separation `1 + 1/sqrt(T)` (the latter only where
/// the chain of estimates applies), plus bucket disjointness.
pub fn verify_pair_separation(
    b: &MultiplicativeSet,
    r: u32,
    t_param: f64,
    caps: &ResourceCaps,
) -> Result<SeparationReport> {
    let n = b.len() as u64;
    let pair_ops = n * (n - 1) / 2;
    if pair_ops > caps.max_enumeration_ops {
        return Err(Error::refusal(format!(
            "pair enumeration needs {pair_ops} operations, cap is {}",
            caps.max_enumeration_ops
        )));
    }
    let m = b.m;
    if m < 2 {
        return Err(Error::domain(
            "pair separation requires M >= 2 (ln ln M undefined for M = 1)",
        ));
    }
    let ln_m = Dd::from_u64(m as u64).ln();
    let x = ln_m + ln_m.ln();
    let log_den_bound = (Dd::from_u64(m as u64) * x).ln() * Dd::from_u64(2 * r as u64);
    let chain_applies =
        log_den_bound.is_finite() && (log_den_bound * Dd::from_f64(2.0)).to_f64() <= t_param.ln();
    let ln_sep = (Dd::ONE / Dd::from_f64(t_param).sqrt()).ln_1p();

    let buckets: Vec<u128> = b
        .elements
        .iter()
        .map(|e| bucket_index(e, t_param))
        .collect::<Result<_>>()?;

    let prime_logs: Vec<Dd> = b.primes.iter().map(|&p| Dd::from_u64(p).ln()).collect();

    let chunk = 64usize;
    let nn = b.len();
    let partials: Vec<SeparationReport> = (0..nn.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut rep = SeparationReport {
                m,
                r,
                t_param,
                chain_applies,
                min_ratio: f64::INFINITY,
                ..Default::default()
            };
            for k in ci * chunk..((ci + 1) * chunk).min(nn) {
                let ek = &b.elements[k];
                for l in k + 1..nn {
                    let el = &b.elements[l];
                    let d = (ek.exponents.bits ^ el.exponents.bits).count_ones();
                    if d == 0 || d > 2 * r {
                        continue;
                    }
                    rep.pairs_in_distance_range += 1;
                    // elements are sorted, so el > ek: denominator bits are
                    // the primes dividing ek only
                    let den_bits = ek.exponents.bits & !el.exponents.bits;
                    let log_den: Dd = (0..m as usize)
                        .filter(|&i| den_bits >> i & 1 == 1)
                        .map(|i| prime_logs[i])
                        .fold(Dd::ZERO, |a, v| a + v);
                    if log_den > log_den_bound {
                        rep.denominator_violations += 1;
                        if rep.examples.len() < 16 {
                            rep.examples.push((k, l));
                        }
                    }
                    let ln_ratio = el.log_value - ek.log_value;
                    let ratio = ln_ratio.to_f64().exp();
                    if ratio < rep.min_ratio {
                        rep.min_ratio = ratio;
                    }
                    if chain_applies && ln_ratio < ln_sep {
                        // near-tie escalation: exact cross multiplication
                        // T (b_l - b_k)^2 >= b_k^2  <=>  ratio >= 1 + 1/sqrt(T)
                        let exact_ok = if t_param.fract() == 0.0 && t_param <= 9.0e15 {
                            let diff = &el.exact_value - &ek.exact_value;
                            let lhs = BigUint::from(t_param as u64) * (&diff * &diff);
                            lhs >= &ek.exact_value * &ek.exact_value
                        } else {
                            false
                        };
                        if !exact_ok {
                            rep.ratio_violations += 1;
                            if rep.examples.len() < 16 {
                                rep.examples.push((k, l));
                            }
                        }
                    }
                    if buckets[k] == buckets[l] {
                        rep.same_bucket_violations += 1;
                        if rep.examples.len() < 16 {
                            rep.examples.push((k, l));
                        }
                    }
                }
            }
            rep
        })
        .collect();

    let mut out = SeparationReport {
        m,
        r,
        t_param,
        chain_applies,
        min_ratio: f64::INFINITY,
        ..Default::default()
    };
    for p in partials {
        out.pairs_in_distance_range += p.pairs_in_distance_range;
        out.denominator_violations += p.denominator_violations;
        out.ratio_violations += p.ratio_violations;
        out.same_bucket_violations += p.same_bucket_violations;
        out.min_ratio = out.min_ratio.min(p.min_ratio);
        for e in p.examples {
            if out.examples.len() < 16 {
                out.examples.push(e);
            }
        }
    }
    Ok(out)
}

/// Outcome of the pairwise ratio check on `D`.
#[derive(Clone, Debug)]
pub struct RatioReport {
    pub k: usize,
    pub pairs_checked: u64,
    pub min_log_margin: f64,
}

/// Verify `d_l / d_k >= (1 + 1/T)^{l - k - 1}` for every pair `k < l`.
///
/// This inequality is unconditional given the construction, so any
/// violation is reported as a construction bug. Adjacent pairs (exponent
/// zero) are decided by exact integer comparison; the rest compare exact
/// element logs against the extended-precision power, escalating to exact
/// big-integer cross multiplication near ties when `T` is integral.
pub fn verify_representative_ratios(d: &RepresentativeSet) -> Result<RatioReport> {
    let k_size = d.k();
    let t_param = d.t_param;
    let ln_ratio = (Dd::ONE / Dd::from_f64(t_param)).ln_1p();
    let escalation_band = Dd::from_f64(1e-24);

    let results: Vec<(u64, f64, u64)> = (0..k_size)
        .into_par_iter()
        .map(|k| {
            let mut pairs = 0u64;
            let mut min_margin = f64::INFINITY;
            let mut violations = 0u64;
            for l in k + 1..k_size {
                pairs += 1;
                let e = (l - k - 1) as u64;
                if e == 0 {
                    // required bound is ratio >= 1; strict ascent is exact
                    if d.elements[l].exact_value <= d.elements[k].exact_value {
                        violations += 1;
                    }
                    continue;
                }
                let lhs = d.elements[l].log_value - d.elements[k].log_value;
                let rhs = ln_ratio * Dd::from_u64(e);
                let margin = lhs - rhs;
                if margin.abs() < escalation_band {
                    let exact_ok = if t_param.fract() == 0.0 && t_param <= 9.0e15 {
                        let t_int = BigUint::from(t_param as u64);
                        let lhs_i =
                            d.elements[l].exact_value.clone() * t_int.pow(e as u32);
                        let rhs_i = d.elements[k].exact_value.clone()
                            * (&t_int + 1u32).pow(e as u32);
                        lhs_i >= rhs_i
                    } else {
                        margin >= Dd::ZERO
                    };
                    if !exact_ok {
                        violations += 1;
                    }
                } else if margin < Dd::ZERO {
                    violations += 1;
                }
                let mf = margin.to_f64();
                if mf < min_margin {
                    min_margin = mf;
                }
            }
            (pairs, min_margin, violations)
        })
        .collect();

    let mut pairs_checked = 0;
    let mut min_log_margin = f64::INFINITY;
    let mut violations = 0;
    for (p, m, v) in results {
        pairs_checked += p;
        min_log_margin = min_log_margin.min(m);
        violations += v;
    }
    if violations > 0 {
        return Err(Error::ConstructionBug(format!(
            "{violations} representative pairs violate the (1+1/T)^(l-k-1) separation"
        )));
    }
    Ok(RatioReport {
        k: k_size,
        pairs_checked,
        min_log_margin,
    })
}

/// Verify the bucket-window property: every `b` in `B` satisfies
/// `1 <= b/d < 1 + 1/T` against the representative `d` of its bucket
/// (exact comparisons throughout for integral `T`).
pub fn verify_bucket_window(b: &MultiplicativeSet, d: &RepresentativeSet) -> Result<u64> {
    let t_param = d.t_param();
    let mut checked = 0u64;
    for e in b.elements() {
        let j = bucket_index(e, t_param)?;
        let rep_idx = d.rep_of_bucket(j).ok_or_else(|| {
            Error::ConstructionBug(format!("bucket {j} has an element but no representative"))
        })?;
        let rep = &d.elements()[rep_idx];
        if e.exact_value < rep.exact_value {
            return Err(Error::ConstructionBug(
                "representative is not the bucket minimum".into(),
            ));
        }
        let within = if t_param.fract() == 0.0 && t_param <= 9.0e15 {
            // b/d < 1 + 1/T  <=>  b T < d (T+1)
            let t_int = BigUint::from(t_param as u64);
            e.exact_value.clone() * &t_int < rep.exact_value.clone() * (&t_int + 1u32)
        } else {
            (ln_biguint(&e.exact_value) - ln_biguint(&rep.exact_value))
                < (Dd::ONE / Dd::from_f64(t_param)).ln_1p()
        };
        if !within {
            return Err(Error::ConstructionBug(format!(
                "element {} exceeds the bucket window above representative {}",
                e.exact_value, rep.exact_value
            )));
        }
        checked += 1;
    }
    Ok(checked)
}
