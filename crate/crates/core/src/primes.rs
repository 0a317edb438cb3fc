//! Prime generation.

use crate::error::{Error, Result};

/// All primes up to a fixed limit, immutable after construction and safe
/// to share across workers.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// Sieve of Eratosthenes over odd numbers.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::invalid("limit must be >= 2"));
    }
    let mut primes = vec![2u64];
    if limit >= 3 {
        let n = ((limit - 1) / 2) as usize; // index i <-> odd number 2i+3
        let mut composite = vec![false; n];
        let mut i = 0usize;
        while (2 * i + 3) * (2 * i + 3) <= limit as usize {
            if !composite[i] {
                let p = 2 * i + 3;
                let mut j = (p * p - 3) / 2;
                while j < n {
                    composite[j] = true;
                    j += p;
                }
            }
            i += 1;
        }
        for (i, &c) in composite.iter().enumerate() {
            if !c {
                primes.push((2 * i + 3) as u64);
            }
        }
    }
    Ok(PrimeTable { limit, primes })
}

/// The `m` smallest primes in increasing order.
pub fn first_m_primes(m: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    // p_m < m (ln m + ln ln m) for m >= 6; generous fixed bound below that
    let mut bound = if m < 6 {
        15.0
    } else {
        let mf = m as f64;
        mf * (mf.ln() + mf.ln().ln()) + 8.0
    };
    loop {
        let table = primes_up_to(bound as u64)?;
        if table.len() >= m {
            return Ok(table.primes()[..m].to_vec());
        }
        bound *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent trial-division oracle.
    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn sieve_matches_trial_division_up_to_1e5() {
        let table = primes_up_to(100_000).unwrap();
        let trial: Vec<u64> = (2..=100_000).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(table.primes(), trial.as_slice());
        assert_eq!(table.len(), 9592);
    }

    #[test]
    fn small_limits() {
        assert_eq!(primes_up_to(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap().primes(), &[2]);
        assert!(primes_up_to(1).is_err());
    }

    #[test]
    fn sieve_is_strictly_increasing() {
        let table = primes_up_to(10_000).unwrap();
        assert!(table.primes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn first_m() {
        assert_eq!(first_m_primes(1).unwrap(), &[2]);
        assert_eq!(first_m_primes(6).unwrap(), &[2, 3, 5, 7, 11, 13]);
        let p25 = first_m_primes(25).unwrap();
        assert_eq!(p25.len(), 25);
        assert_eq!(*p25.last().unwrap(), 97);
        assert!(first_m_primes(0).is_err());
    }

    #[test]
    fn first_m_agrees_with_sieve_for_various_m() {
        let table = primes_up_to(200_000).unwrap();
        for m in [1usize, 2, 5, 6, 7, 100, 1000, 9592] {
            let got = first_m_primes(m).unwrap();
            assert_eq!(got.as_slice(), &table.primes()[..m], "m={m}");
        }
    }
}
