//! Prime powers and the intensities of the pseudo-lattice layers.
//!
//! The layer with exact denominator `n` gets intensity
//! `w_n = n^2 * prod_{p | n} (1 - 1/p^2)`, which is the Jordan totient `J_2(n)`.
//! The layers over the divisors of `n` add up to a plain Poisson process of
//! intensity `n^2`, so `sum_{d | n} w_d = n^2` holds exactly in integers.

use serde::{Deserialize, Serialize};

use crate::error::NumberTheoryError;

/// A prime power `base^exponent` together with its rank in the ascending sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub value: u64,
    pub base: u64,
    pub exponent: u32,
    /// 1-based rank `k` of `value` among all prime powers.
    pub index: usize,
}

/// Exact intensity of layer `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intensity {
    pub n: u64,
    pub w: u64,
}

impl Intensity {
    /// Intensity as points per unit plain area, for the sampling boundary.
    pub fn as_f64(&self) -> f64 {
        self.w as f64
    }
}

/// Smallest-prime-factor sieve over `0..=limit`.
///
/// Read-only after construction, so a shared reference can be used from
/// several threads.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(1);
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && n <= self.limit() && self.spf[n] as usize == n
    }

    /// Returns `(base, exponent)` when `n` is a prime power within the sieve range.
    pub fn prime_power_parts(&self, n: usize) -> Option<(u64, u32)> {
        if n < 2 || n > self.limit() {
            return None;
        }
        let p = self.spf[n] as usize;
        let mut m = n;
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        (m == 1).then_some((p as u64, e))
    }

    /// Distinct prime factors of `n`, ascending. Falls back to trial division above the sieve range.
    pub fn distinct_primes(&self, n: u64) -> Vec<u64> {
        if n as usize <= self.limit() {
            let mut out = Vec::new();
            let mut m = n as usize;
            while m > 1 {
                let p = self.spf[m] as usize;
                out.push(p as u64);
                while m.is_multiple_of(p) {
                    m /= p;
                }
            }
            out
        } else {
            distinct_primes(n)
        }
    }
}

/// Ascending table of the first `len` prime powers.
#[derive(Debug, Clone)]
pub struct PrimePowerTable {
    terms: Vec<PrimePower>,
}

impl PrimePowerTable {
    /// Builds the first `count` prime powers, growing the sieve until it covers them.
    pub fn with_terms(count: usize) -> Self {
        let count = count.max(1);
        // q_k ~ k ln k; start a little above that and double on shortfall.
        let mut limit = {
            let k = count as f64;
            (k * (k.ln().max(1.0) + 3.0)) as usize + 16
        };
        loop {
            let sieve = Sieve::new(limit);
            let mut terms = Vec::with_capacity(count);
            for v in 2..=limit {
                if let Some((base, exponent)) = sieve.prime_power_parts(v) {
                    terms.push(PrimePower {
                        value: v as u64,
                        base,
                        exponent,
                        index: terms.len() + 1,
                    });
                    if terms.len() == count {
                        return Self { terms };
                    }
                }
            }
            limit *= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The `k`-th prime power (1-based).
    pub fn get(&self, k: usize) -> Result<PrimePower, NumberTheoryError> {
        if k == 0 {
            return Err(NumberTheoryError::ZeroIndex);
        }
        self.terms
            .get(k - 1)
            .copied()
            .ok_or(NumberTheoryError::TableExhausted { k, len: self.terms.len() })
    }

    pub fn iter(&self) -> impl Iterator<Item = &PrimePower> {
        self.terms.iter()
    }
}

/// The `k`-th smallest prime power, `k >= 1`.
///
/// Builds a fresh table; callers stepping through many indices should hold a
/// [`PrimePowerTable`] instead.
pub fn prime_power_seq(k: usize) -> Result<PrimePower, NumberTheoryError> {
    if k == 0 {
        return Err(NumberTheoryError::ZeroIndex);
    }
    PrimePowerTable::with_terms(k).get(k)
}

fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exact `J_2(n)`. Fails on `n = 0` and when `n^2` does not fit in `u64`.
pub fn intensity(n: u64) -> Result<Intensity, NumberTheoryError> {
    intensity_with_primes(n, &distinct_primes_checked(n)?)
}

/// Same as [`intensity`], factoring through a cached sieve.
pub fn intensity_with_sieve(n: u64, sieve: &Sieve) -> Result<Intensity, NumberTheoryError> {
    if n == 0 {
        return Err(NumberTheoryError::NonPositive);
    }
    intensity_with_primes(n, &sieve.distinct_primes(n))
}

fn distinct_primes_checked(n: u64) -> Result<Vec<u64>, NumberTheoryError> {
    if n == 0 {
        return Err(NumberTheoryError::NonPositive);
    }
    Ok(distinct_primes(n))
}

fn intensity_with_primes(n: u64, primes: &[u64]) -> Result<Intensity, NumberTheoryError> {
    let mut w = n.checked_mul(n).ok_or(NumberTheoryError::Overflow { n })?;
    for &p in primes {
        // p^2 divides the running value: each step strips one distinct prime square.
        let p2 = p * p;
        w = (w / p2) * (p2 - 1);
    }
    Ok(Intensity { n, w })
}

/// Intensity of the layer indexed by a prime power.
pub fn prime_power_intensity(q: &PrimePower) -> Result<Intensity, NumberTheoryError> {
    intensity_with_primes(q.value, &[q.base])
}

/// Checks `sum_{d | n} w_d = n^2` in exact integer arithmetic.
pub fn verify_partition(n: u64) -> Result<bool, NumberTheoryError> {
    let square = n
        .checked_mul(n)
        .ok_or(NumberTheoryError::Overflow { n })
        .and_then(|sq| if n == 0 { Err(NumberTheoryError::NonPositive) } else { Ok(sq) })?;
    let mut total: u64 = 0;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total = total
                .checked_add(intensity(d)?.w)
                .ok_or(NumberTheoryError::Overflow { n })?;
            let e = n / d;
            if e != d {
                total = total
                    .checked_add(intensity(e)?.w)
                    .ok_or(NumberTheoryError::Overflow { n })?;
            }
        }
        d += 1;
    }
    Ok(total == square)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn first_prime_powers() {
        let table = PrimePowerTable::with_terms(10);
        let values: Vec<u64> = table.iter().map(|q| q.value).collect();
        assert_eq!(values, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16]);
        assert_eq!(prime_power_seq(1).unwrap().value, 2);
        assert_eq!(prime_power_seq(3).unwrap().value, 4);
        let q10 = prime_power_seq(10).unwrap();
        assert_eq!((q10.value, q10.base, q10.exponent, q10.index), (16, 2, 4, 10));
    }

    #[test]
    fn zero_index_rejected() {
        assert_eq!(prime_power_seq(0), Err(NumberTheoryError::ZeroIndex));
        assert!(PrimePowerTable::with_terms(3).get(4).is_err());
    }

    #[test]
    fn intensity_examples() {
        assert_eq!(intensity(1).unwrap().w, 1);
        assert_eq!(intensity(2).unwrap().w, 3);
        assert_eq!(intensity(12).unwrap().w, 96);
        assert_eq!(intensity(0), Err(NumberTheoryError::NonPositive));
    }

    #[test]
    fn intensity_overflow_is_reported() {
        let big = 1u64 << 33;
        assert_eq!(intensity(big), Err(NumberTheoryError::Overflow { n: big }));
        assert!(intensity((1u64 << 32) - 1).is_ok());
        assert!(verify_partition(big).is_err());
    }

    #[test]
    fn sieve_and_trial_division_agree() {
        let sieve = Sieve::new(2000);
        for n in 1..=3000u64 {
            assert_eq!(intensity_with_sieve(n, &sieve), intensity(n), "n = {n}");
        }
    }

    #[test]
    fn partition_examples() {
        assert!(verify_partition(1).unwrap());
        assert!(verify_partition(6).unwrap());
        assert!(verify_partition(12).unwrap());
        // divisor-sum oracle for n = 6 and 12
        let sum = |ds: &[u64]| ds.iter().map(|&d| intensity(d).unwrap().w).sum::<u64>();
        assert_eq!(sum(&[1, 2, 3, 6]), 36);
        assert_eq!(sum(&[1, 2, 3, 4, 6, 12]), 144);
    }

    #[test]
    fn table_matches_naive_enumeration() {
        let table = PrimePowerTable::with_terms(500);
        let mut naive = Vec::new();
        let mut v = 2u64;
        while naive.len() < 500 {
            let p = (2..=v).find(|d| v.is_multiple_of(*d)).unwrap();
            let mut m = v;
            while m.is_multiple_of(p) {
                m /= p;
            }
            if m == 1 && naive_is_prime(p) {
                naive.push(v);
            }
            v += 1;
        }
        let got: Vec<u64> = table.iter().map(|q| q.value).collect();
        assert_eq!(got, naive);
    }

    #[test]
    fn prime_power_intensity_matches_general_formula() {
        for q in PrimePowerTable::with_terms(200).iter() {
            assert_eq!(prime_power_intensity(q).unwrap(), intensity(q.value).unwrap());
            assert!(2 * prime_power_intensity(q).unwrap().w > q.value * q.value);
        }
    }
}
