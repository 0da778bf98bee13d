//! Segmented multiplicative sieve: sigma(n) for every n in a window
//! [lo, hi) in one pass.
//!
//! Each window keeps two scratch arrays.  One holds the cofactor of n that
//! remains once the sieved primes are divided out, the other accumulates
//! the sigma contributions of those primes.  Base primes run up to
//! sqrt(hi - 1); any cofactor still above 1 after they are applied must be
//! a single prime beyond that bound and contributes (cofactor + 1).
//!
//! The inner loops never divide.  Every odd base prime p is stored with its
//! inverse mod 2^64, so an exact division by p is one wrapping multiply,
//! and "does p still divide r" is that same multiply compared against
//! floor(u64::MAX / p): the products of the multiples of p land exactly on
//! 0, 1, 2, ... while everything else is flung above the threshold.
//! Powers of two come off with `trailing_zeros`.

use thiserror::Error;

/// Largest n for which sigma(n) provably fits in u64.  The divisor sum
/// obeys sigma(n)/n <= H_n < 1 + ln n, and n(1 + ln n) stays below 2^64
/// up to this bound.
pub const MAX_SIGMA_SAFE_N: u64 = 440_000_000_000_000_000;

/// Default ceiling on prime-table memory (bitmap plus primes plus
/// inverses), enough for the full safe sieve range with headroom.
pub const DEFAULT_TABLE_BUDGET_BYTES: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("empty or inverted window [{lo}, {hi})")]
    EmptyWindow { lo: u64, hi: u64 },
    #[error("windows start at 1; got lo = 0")]
    ZeroStart,
    #[error("prime table stops at {limit}, window needs primes to {needed}")]
    TableTooSmall { limit: u64, needed: u64 },
    #[error(
        "window reaches {top}; sigma may overflow u64 past {}",
        MAX_SIGMA_SAFE_N
    )]
    BeyondSafeRange { top: u64 },
    #[error("prime table limit must be at least 2, got {limit}")]
    LimitTooSmall { limit: u64 },
    #[error("prime table to {limit} needs about {need} bytes, budget is {budget}")]
    BudgetExceeded { limit: u64, need: u64, budget: u64 },
}

/// Primes up to a limit, each odd one paired with the data for exact
/// division by multiplication.
pub struct SmallPrimeTable {
    limit: u64,
    primes: Vec<u64>,
    /// (inverse of p mod 2^64, floor(u64::MAX / p)) for primes[1..].
    inv: Vec<(u64, u64)>,
}

impl SmallPrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes up to the limit, ascending, starting with 2.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    fn odd_inverses(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.primes[1..]
            .iter()
            .zip(&self.inv)
            .map(|(&p, &(inv, max_exact))| (p, inv, max_exact))
    }
}

/// Inverse of odd p mod 2^64 by Newton iteration: x -> x(2 - px) doubles
/// the number of correct low bits, and x = p is already right mod 8.
fn inv_mod_pow2(p: u64) -> u64 {
    debug_assert!(p % 2 == 1);
    let mut x = p;
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(x)));
    }
    debug_assert_eq!(p.wrapping_mul(x), 1);
    x
}

pub fn small_primes(limit: u64) -> Result<SmallPrimeTable, SieveError> {
    small_primes_with_budget(limit, DEFAULT_TABLE_BUDGET_BYTES)
}

pub fn small_primes_with_budget(limit: u64, budget: u64) -> Result<SmallPrimeTable, SieveError> {
    if limit < 2 {
        return Err(SieveError::LimitTooSmall { limit });
    }
    // Bitmap of odds plus 24 bytes per prime; pi(x) < 1.3 x / ln x for
    // x >= 17 covers the prime count generously.
    let pi_bound = (1.3 * (limit as f64) / (limit as f64).ln()).ceil() as u64 + 8;
    let need = limit / 16 + pi_bound * 24;
    if need > budget {
        return Err(SieveError::BudgetExceeded {
            limit,
            need,
            budget,
        });
    }

    // Odd-only sieve of Eratosthenes: bit i stands for 2i + 1.
    let n_odds = limit.div_ceil(2) as usize;
    let mut composite = vec![0u64; n_odds.div_ceil(64)];
    let mut i = 1usize;
    loop {
        let p = 2 * i as u64 + 1;
        if p * p > limit {
            break;
        }
        if composite[i / 64] & (1 << (i % 64)) == 0 {
            let mut j = ((p * p - 1) / 2) as usize;
            while j < n_odds {
                composite[j / 64] |= 1 << (j % 64);
                j += p as usize;
            }
        }
        i += 1;
    }

    let mut primes = vec![2u64];
    for i in 1..n_odds {
        if composite[i / 64] & (1 << (i % 64)) == 0 {
            primes.push(2 * i as u64 + 1);
        }
    }
    let inv = primes[1..]
        .iter()
        .map(|&p| (inv_mod_pow2(p), u64::MAX / p))
        .collect();
    Ok(SmallPrimeTable { limit, primes, inv })
}

/// sigma over a contiguous window of integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    lo: u64,
    hi: u64,
    sigma: Vec<u64>,
}

impl Segment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// sigma(lo), sigma(lo + 1), ..., sigma(hi - 1).
    pub fn sigma_values(&self) -> &[u64] {
        &self.sigma
    }

    pub fn sigma_of(&self, n: u64) -> Option<u64> {
        if n < self.lo || n >= self.hi {
            return None;
        }
        Some(self.sigma[(n - self.lo) as usize])
    }

    /// (n, sigma(n)) pairs in order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.lo..self.hi).zip(self.sigma.iter().copied())
    }
}

pub fn sieve_segment(lo: u64, hi: u64, table: &SmallPrimeTable) -> Result<Segment, SieveError> {
    if lo == 0 {
        return Err(SieveError::ZeroStart);
    }
    if lo >= hi {
        return Err(SieveError::EmptyWindow { lo, hi });
    }
    let top = hi - 1;
    if top > MAX_SIGMA_SAFE_N {
        return Err(SieveError::BeyondSafeRange { top });
    }
    let root = top.isqrt();
    if table.limit() < root {
        return Err(SieveError::TableTooSmall {
            limit: table.limit(),
            needed: root,
        });
    }

    let len = (hi - lo) as usize;
    let mut cofactor: Vec<u64> = (lo..hi).collect();
    let mut sigma = vec![1u64; len];

    // Powers of two, off the even positions in one stroke each.
    let mut idx = (lo & 1) as usize; // lo even -> 0, lo odd -> 1
    while idx < len {
        let tz = cofactor[idx].trailing_zeros();
        cofactor[idx] >>= tz;
        sigma[idx] = (1u64 << (tz + 1)) - 1;
        idx += 2;
    }

    for (p, inv, max_exact) in table.odd_inverses() {
        if p > root {
            break;
        }
        let first = lo.div_ceil(p) * p;
        if first >= hi {
            continue;
        }
        let step = p as usize;
        let mut idx = (first - lo) as usize;
        while idx < len {
            // Divisible at least once by construction; keep dividing while
            // the inverse-multiply stays in the exact-quotient zone.
            let mut r = cofactor[idx].wrapping_mul(inv);
            let mut term = p + 1;
            loop {
                let q = r.wrapping_mul(inv);
                if q > max_exact {
                    break;
                }
                r = q;
                term = term * p + 1;
            }
            cofactor[idx] = r;
            sigma[idx] *= term;
            idx += step;
        }
    }

    // Whatever survives is 1 or a prime above sqrt(hi - 1).
    for i in 0..len {
        let r = cofactor[i];
        if r > 1 {
            sigma[i] *= r + 1;
        }
    }

    Ok(Segment { lo, hi, sigma })
}
