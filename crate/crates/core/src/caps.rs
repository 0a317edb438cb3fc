use serde::{Deserialize, Serialize};

/// Resource caps. These are configuration, not constants: every limit can
/// be raised by a caller that knows its budget. Exceeding a cap yields a
/// resource refusal, never a silent truncation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ResourceCaps {
    /// Largest M for which the 2^M set elements are materialized with
    /// exact integer values.
    pub max_exact_m: u32,
    /// Pair/quadruple enumeration budget (number of elementary operations).
    pub max_enumeration_ops: u64,
    /// Largest set size accepted by the brute-force GCD sum.
    pub max_bruteforce_set: usize,
    /// Largest T for the type-3 tail double loop.
    pub max_tail_t: f64,
    /// Largest T accepted by the grid search driver.
    pub max_search_t: f64,
    /// Largest |t| accepted by the reference zeta oracle.
    pub max_reference_t: f64,
    /// Largest T for direct quadrature of the resonance integral.
    pub max_quadrature_t: f64,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps {
            max_exact_m: 26,
            max_enumeration_ops: 1_000_000_000,
            max_bruteforce_set: 1 << 12,
            max_tail_t: 2000.0,
            max_search_t: 1e5,
            max_reference_t: 1e7,
            max_quadrature_t: 1e4,
        }
    }
}
