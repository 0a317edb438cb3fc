//! Gál-type GCD sums over the multiplicative set: the brute-force double
//! sum, the per-row product closed form, the distance-restricted sum, and
//! the chain of estimates that lower-bounds the restricted sum.

use crate::asymptotics::{ln_biguint, log_binomial_x};
use crate::caps::ResourceCaps;
use crate::construction::{choose_r, MultiplicativeSet};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::primes::first_m_primes;
use crate::scalar::CompensatedSum;
use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Value};

/// `sum_{k,l} gcd(n_k,n_l)^{2a} / (n_k n_l)^a` over a set of distinct
/// positive integers, by direct enumeration of all pairs.
pub fn gcd_sum_bruteforce(set: &[BigUint], alpha: f64, caps: &ResourceCaps) -> Result<f64> {
    if set.len() > caps.max_bruteforce_set {
        return Err(Error::refusal(format!(
            "set of {} elements exceeds the brute-force cap {}",
            set.len(),
            caps.max_bruteforce_set
        )));
    }
    {
        let mut sorted = set.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("set elements must be pairwise distinct"));
        }
    }
    let n = set.len();
    if n == 0 {
        return Ok(0.0);
    }

    // u64 fast path covers every set the cap admits in practice
    if let Some(small) = set
        .iter()
        .map(|v| u64::try_from(v).ok())
        .collect::<Option<Vec<u64>>>()
    {
        let logs: Vec<f64> = small.iter().map(|&v| (v as f64).ln()).collect();
        let chunk = 64usize;
        let partials: Vec<CompensatedSum<f64>> = (0..n.div_ceil(chunk))
            .into_par_iter()
            .map(|ci| {
                let mut acc = CompensatedSum::new();
                for k in ci * chunk..((ci + 1) * chunk).min(n) {
                    for l in k + 1..n {
                        let g = small[k].gcd(&small[l]);
                        let term =
                            (alpha * (2.0 * (g as f64).ln() - logs[k] - logs[l])).exp();
                        acc.add(2.0 * term);
                    }
                }
                acc
            })
            .collect();
        let mut total = CompensatedSum::new();
        total.add(n as f64); // diagonal terms are exactly 1
        for p in &partials {
            total.merge(p);
        }
        return Ok(total.value());
    }

    let logs: Vec<f64> = set.iter().map(|v| ln_biguint(v).to_f64()).collect();
    let mut total = CompensatedSum::new();
    total.add(n as f64);
    for k in 0..n {
        for l in k + 1..n {
            let g = set[k].gcd(&set[l]);
            let term = (alpha * (2.0 * ln_biguint(&g).to_f64() - logs[k] - logs[l])).exp();
            total.add(2.0 * term);
        }
    }
    Ok(total.value())
}

/// Log of the row closed form `prod_{r<=M} (1 + p_r^{-alpha})`, which
/// equals `sum_l gcd(b_k,b_l)^{2a}/(b_k b_l)^a` for every fixed `k`.
pub fn gcd_sum_row_product_log(m: u32, alpha: f64) -> Result<Dd> {
    if m == 0 {
        return Err(Error::invalid("row product requires M >= 1"));
    }
    let primes = first_m_primes(m as usize)?;
    let a = Dd::from_f64(alpha);
    let mut log_sum = Dd::ZERO;
    for p in primes {
        let p_pow = (-(a * Dd::from_u64(p).ln())).exp();
        log_sum += p_pow.ln_1p();
    }
    Ok(log_sum)
}

/// The row closed form itself.
pub fn gcd_sum_row_product(m: u32, alpha: f64) -> Result<f64> {
    gcd_sum_row_product_log(m, alpha).map(|l| l.exp().to_f64())
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < m - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Restricted-sum core over an explicit prime list: the term for each
/// R-subset of positions is `prod p^{-alpha}` over the subset; the value
/// does not depend on which element the distance is measured from.
pub(crate) fn restricted_sum_from_primes(primes: &[u64], r: u32, alpha: f64) -> f64 {
    if r == 0 {
        return 1.0; // only l = k itself
    }
    let p_pow: Vec<f64> = primes
        .iter()
        .map(|&p| (-(Dd::from_f64(alpha) * Dd::from_u64(p).ln())).exp().to_f64())
        .collect();
    let mut idx: Vec<usize> = (0..r as usize).collect();
    let mut acc = CompensatedSum::new();
    loop {
        let term: f64 = idx.iter().map(|&i| p_pow[i]).product();
        acc.add(term);
        if !next_combination(&mut idx, primes.len()) {
            break;
        }
    }
    acc.value()
}

/// `sum over l with delta(b_k, b_l) = R` of the GCD-sum terms, generated
/// combinatorially: each term is `prod_{r in flipped positions} p_r^{-a}`,
/// so the sum runs over R-subsets of the M positions rather than over all
/// N^2 pairs.
pub fn gcd_sum_distance_restricted(
    b: &MultiplicativeSet,
    k: usize,
    r: u32,
    alpha: f64,
    caps: &ResourceCaps,
) -> Result<f64> {
    if k >= b.len() {
        return Err(Error::invalid("element index k out of range"));
    }
    let m = b.m();
    if r > m {
        return Err(Error::invalid("distance R cannot exceed M"));
    }
    let n_terms = log_binomial_x(m as u64, r as u64)?.exp().to_f64();
    if n_terms > caps.max_enumeration_ops as f64 {
        return Err(Error::refusal(format!(
            "binom({m},{r}) ~ {n_terms:.3e} exceeds the enumeration cap"
        )));
    }
    Ok(restricted_sum_from_primes(b.primes(), r, alpha))
}

/// The exponent `M^{1-alpha} / (2.72 (ln M)^alpha)` of the lemma's lower
/// bound, in log domain.
pub fn lemma1_bound(m: u32, alpha: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::domain("lemma1_bound requires M >= 3"));
    }
    let mf = Dd::from_u64(m as u64);
    let a = Dd::from_f64(alpha);
    let v = mf.powf(Dd::ONE - a) / (Dd::from_f64(2.72) * mf.ln().powf(a));
    Ok(v.to_f64())
}

/// Evaluation of every link in the restricted-sum lower-bound chain at one
/// `(M, alpha)`. Each boolean is the literal truth value of its inequality
/// at these parameters; links that only hold for astronomically large `M`
/// are reported, never assumed.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub m: u32,
    pub alpha: f64,
    /// The floored formula value of R, clamped to >= 1.
    pub r: u32,
    /// True when the unclamped formula value was 0.
    pub r_clamped: bool,
    /// Brute-forced restricted sum (only filled by the `_with_set` variant).
    pub lhs_restricted_sum: Option<f64>,
    pub restricted_term_count: Option<u64>,
    /// Every restricted term is >= (M(lnM+lnlnM))^{-aR} (exact check).
    pub per_term_floor_ok: Option<bool>,
    /// Every restricted term is <= 2^{-aR} (exact check).
    pub per_term_upper_ok: Option<bool>,
    /// log of `binom(M,R) (M(lnM+lnlnM))^{-aR}`.
    pub binomial_term: f64,
    /// log of the Stirling lower form for the same quantity.
    pub stirling_lower: f64,
    /// log of the exponent form `(1/(3 sqrt M)) exp(R lnM - R lnR - aR ln(MX))`.
    pub exponent_form: f64,
    /// `R ln M - R ln R - aR ln(M(lnM+lnlnM)) - R`.
    pub exponent_margin: f64,
    /// log-domain final bound `M^{1-a} / (2.72 (ln M)^a)`.
    pub final_bound: f64,
    /// Link (i): binomial_term >= stirling_lower.
    pub link_binomial_vs_stirling: bool,
    /// Link (i'): stirling_lower >= exponent_form.
    pub link_stirling_vs_exponent: bool,
    /// Link (ii): exponent_margin >= 0.
    pub link_margin_nonneg: bool,
    /// Link (iii): `ln(1/(3 sqrt M)) + R >= final_bound`.
    pub link_final: bool,
}

impl ChainReport {
    pub fn to_json(&self) -> Value {
        let d = |x: f64| crate::fmt_g17(x);
        json!({
            "M": self.m,
            "alpha": d(self.alpha),
            "R": self.r,
            "r_clamped": self.r_clamped,
            "lhs_restricted_sum": self.lhs_restricted_sum.map(d),
            "restricted_term_count": self.restricted_term_count,
            "per_term_floor_ok": self.per_term_floor_ok,
            "per_term_upper_ok": self.per_term_upper_ok,
            "binomial_term": d(self.binomial_term),
            "stirling_lower": d(self.stirling_lower),
            "exponent_form": d(self.exponent_form),
            "exponent_margin": d(self.exponent_margin),
            "final_bound": d(self.final_bound),
            "inequalities_held": {
                "binomial_vs_stirling": self.link_binomial_vs_stirling,
                "stirling_vs_exponent": self.link_stirling_vs_exponent,
                "margin_nonneg": self.link_margin_nonneg,
                "final": self.link_final,
            },
        })
    }
}

/// Evaluate the chain links at `(M, alpha)` without materializing the set.
pub fn lemma1_chain_check(m: u32, alpha: f64) -> Result<ChainReport> {
    if m < 3 {
        return Err(Error::domain("lemma1_chain_check requires M >= 3"));
    }
    let choice = choose_r(m, alpha)?;
    let r = choice.clamped();
    let a = Dd::from_f64(alpha);
    let mf = Dd::from_u64(m as u64);
    let rf = Dd::from_u64(r as u64);
    let ln_m = mf.ln();
    let ln_mx = (mf * (ln_m + ln_m.ln())).ln();
    let ar_ln_mx = a * rf * ln_mx;

    let binomial_term = log_binomial_x(m as u64, r as u64)? - ar_ln_mx;
    let half = Dd::from_f64(0.5);
    let m_minus_r = Dd::from_u64((m - r) as u64);
    let stirling_lower = (mf + half) * ln_m
        - (m_minus_r + half) * m_minus_r.ln()
        - (rf + half) * rf.ln()
        - Dd::from_u64(3).ln()
        - ar_ln_mx;
    let exponent_form =
        rf * (ln_m - rf.ln()) - ar_ln_mx - Dd::from_u64(3).ln() - half * ln_m;
    let exponent_margin = rf * (ln_m - rf.ln() - a * ln_mx - Dd::ONE);
    let final_bound = mf.powf(Dd::ONE - a) / (Dd::from_f64(2.72) * ln_m.powf(a));
    let lhs_final = rf - Dd::from_u64(3).ln() - half * ln_m;

    Ok(ChainReport {
        m,
        alpha,
        r,
        r_clamped: choice.asymptotic_regime,
        lhs_restricted_sum: None,
        restricted_term_count: None,
        per_term_floor_ok: None,
        per_term_upper_ok: None,
        binomial_term: binomial_term.to_f64(),
        stirling_lower: stirling_lower.to_f64(),
        exponent_form: exponent_form.to_f64(),
        exponent_margin: exponent_margin.to_f64(),
        final_bound: final_bound.to_f64(),
        link_binomial_vs_stirling: binomial_term >= stirling_lower,
        link_stirling_vs_exponent: stirling_lower >= exponent_form,
        link_margin_nonneg: exponent_margin >= Dd::ZERO,
        link_final: lhs_final >= final_bound,
    })
}

/// Chain check plus the brute-forced restricted sum and exact per-term
/// bounds over the materialized set.
pub fn lemma1_chain_check_with_set(
    b: &MultiplicativeSet,
    k: usize,
    alpha: f64,
    caps: &ResourceCaps,
) -> Result<ChainReport> {
    let mut report = lemma1_chain_check(b.m(), alpha)?;
    let r = report.r;
    report.lhs_restricted_sum =
        Some(gcd_sum_distance_restricted(b, k, r, alpha, caps)?);

    // exact per-term bounds: (MX)^{-aR} <= term <= 2^{-aR}
    // <=> 2^R <= prod of flipped primes and prod <= (MX)^R
    let m = b.m() as usize;
    let mf = Dd::from_u64(m as u64);
    let ln_mx_r = (mf * (mf.ln() + mf.ln().ln())).ln() * Dd::from_u64(r as u64);
    let prime_logs: Vec<Dd> = b.primes().iter().map(|&p| Dd::from_u64(p).ln()).collect();
    let mut idx: Vec<usize> = (0..r as usize).collect();
    let mut count = 0u64;
    let mut floor_ok = true;
    let mut upper_ok = true;
    loop {
        count += 1;
        let log_prod: Dd = idx.iter().map(|&i| prime_logs[i]).fold(Dd::ZERO, |a, v| a + v);
        if log_prod > ln_mx_r {
            floor_ok = false;
        }
        let prod: u128 = idx.iter().map(|&i| b.primes()[i] as u128).product();
        if prod < 1u128 << r {
            upper_ok = false;
        }
        if !next_combination(&mut idx, m) {
            break;
        }
    }
    report.restricted_term_count = Some(count);
    report.per_term_floor_ok = Some(floor_ok);
    report.per_term_upper_ok = Some(upper_ok);
    Ok(report)
}

/// Ratio of a set's brute-force GCD sum to the universal-bound shape
/// `N exp(c (log N)^{1-a} / (log log N)^a)`; reported without asserting
/// anything (the universal bound for arbitrary sets is out of scope).
pub fn universal_bound_ratio(
    set: &[BigUint],
    alpha: f64,
    c: f64,
    caps: &ResourceCaps,
) -> Result<f64> {
    let n = set.len() as f64;
    if set.len() < 3 {
        return Err(Error::invalid("ratio requires at least 3 elements"));
    }
    let sum = gcd_sum_bruteforce(set, alpha, caps)?;
    let shape = n * (c * n.ln().powf(1.0 - alpha) / n.ln().ln().powf(alpha)).exp();
    Ok(sum / shape)
}
