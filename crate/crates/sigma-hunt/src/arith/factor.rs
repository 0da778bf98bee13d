//! Factoring: trial division by a fixed table of small primes, then Brent's
//! cycle-finding variant of Pollard rho on whatever survives.
//!
//! Rho is randomized, so each attempt gets a bounded iteration budget and a
//! bounded number of restarts; exhausting both surfaces as an error carrying
//! the composite that resisted.  The restart seeds derive deterministically
//! from the input, which keeps the whole factorizer reproducible.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

use super::primality::{is_prime_u64, is_probable_prime};
use super::{ArithError, BigFactorization, Factorization};

/// Trial division covers primes below this; composites whose second-largest
/// prime factor exceeds it go to rho.
const TRIAL_LIMIT: u64 = 1 << 16;

/// f-evaluations a single rho attempt may spend before restarting.
const RHO_CYCLE_BUDGET: u64 = 1 << 20;

/// Restarts (fresh polynomial constant and starting point) per composite.
const RHO_MAX_RESTARTS: u64 = 64;

/// Steps between gcd evaluations inside a rho attempt.
const RHO_BATCH: u64 = 128;

fn trial_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::new();
        for p in 2..limit {
            if composite[p] {
                continue;
            }
            primes.push(p as u64);
            for m in (p * p..limit).step_by(p) {
                composite[m] = true;
            }
        }
        primes
    })
}

pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut m = n;
    for &p in trial_primes() {
        if p * p > m {
            break;
        }
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
    }
    if m > 1 {
        split_u64(m, &mut primes)?;
    }
    Ok(Factorization::from_sorted(run_length(primes)))
}

/// Splits m (coprime to all trial primes, > 1) into primes via rho.
fn split_u64(m: u64, out: &mut Vec<u64>) -> Result<(), ArithError> {
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if is_prime_u64(c) {
            out.push(c);
            continue;
        }
        let f = brent_rho_u64(c).ok_or(ArithError::FactoringGaveUp {
            cofactor: BigUint::from(c),
        })?;
        stack.push(f);
        stack.push(c / f);
    }
    Ok(())
}

pub fn factorize_big(n: &BigUint) -> Result<BigFactorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Zero);
    }
    if let Some(v) = n.to_u64() {
        return Ok(BigFactorization::from(&factorize(v)?));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let mut m = n.clone();
    for &p in trial_primes() {
        while (&m % p).is_zero() {
            primes.push(BigUint::from(p));
            m /= p;
        }
        if let Some(v) = m.to_u64() {
            // Shrunk into u64 range; the fast path finishes the job.
            for &(q, e) in factorize(v)?.factors() {
                for _ in 0..e {
                    primes.push(BigUint::from(q));
                }
            }
            return Ok(BigFactorization::from_sorted(run_length(primes)));
        }
    }
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if let Some(v) = c.to_u64() {
            split_u64_into_big(v, &mut primes)?;
            continue;
        }
        if is_probable_prime(&c) {
            primes.push(c);
            continue;
        }
        // Rho's cycle length scales with the square root of the smallest
        // prime factor, so a square of a large prime would never split.
        // Peel perfect powers off first.
        if let Some((root, k)) = perfect_power(&c) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        let f = brent_rho_big(&c).ok_or(ArithError::FactoringGaveUp {
            cofactor: c.clone(),
        })?;
        stack.push(&c / &f);
        stack.push(f);
    }
    Ok(BigFactorization::from_sorted(run_length(primes)))
}

/// The pair (r, k) with n = r^k for the smallest prime k admitting one.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    let mut k = 2;
    while k <= bits {
        let r = n.nth_root(k);
        if r.pow(k) == *n {
            return Some((r, k));
        }
        k = next_prime_exponent(k);
    }
    None
}

fn next_prime_exponent(k: u32) -> u32 {
    let mut k = k + 1;
    while !is_prime_u64(k as u64) {
        k += 1;
    }
    k
}

fn split_u64_into_big(v: u64, out: &mut Vec<BigUint>) -> Result<(), ArithError> {
    let mut small = Vec::new();
    split_u64(v, &mut small)?;
    out.extend(small.into_iter().map(BigUint::from));
    Ok(())
}

/// Collapses a sorted multiset of primes into (prime, exponent) pairs.
fn run_length<T: Ord>(mut primes: Vec<T>) -> Vec<(T, u32)> {
    primes.sort();
    let mut out: Vec<(T, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// One factor of an odd composite n, or None after every restart failed.
fn brent_rho_u64(n: u64) -> Option<u64> {
    let mut seed = n;
    for _ in 0..RHO_MAX_RESTARTS {
        let y0 = splitmix(&mut seed) % n;
        let c = 1 + splitmix(&mut seed) % (n - 1);
        if let Some(f) = brent_cycle_u64(n, y0, c) {
            return Some(f);
        }
    }
    None
}

fn brent_cycle_u64(n: u64, y0: u64, c: u64) -> Option<u64> {
    let step = |y: u64| {
        let sq = mul_mod(y, y, n);
        let s = sq.wrapping_add(c);
        if s >= n || s < sq {
            s.wrapping_sub(n)
        } else {
            s
        }
    };
    let mut y = y0;
    let mut r: u64 = 1;
    let mut q: u64 = 1;
    let mut g: u64 = 1;
    let mut x = y;
    let mut ys = y;
    let mut used: u64 = 0;
    while g == 1 && used < RHO_CYCLE_BUDGET {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        used += r;
        let mut k = 0;
        while k < r && g == 1 && used < RHO_CYCLE_BUDGET {
            ys = y;
            let lim = RHO_BATCH.min(r - k);
            for _ in 0..lim {
                y = step(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            used += lim;
            g = num_integer::gcd(q, n);
            k += lim;
        }
        r <<= 1;
    }
    if g == n {
        // The batched product jumped past the factor; re-walk the last
        // batch one gcd at a time.
        g = 1;
        for _ in 0..RHO_BATCH {
            ys = step(ys);
            let h = num_integer::gcd(x.abs_diff(ys), n);
            if h > 1 {
                g = h;
                break;
            }
        }
    }
    if g > 1 && g < n {
        Some(g)
    } else {
        None
    }
}

fn brent_rho_big(n: &BigUint) -> Option<BigUint> {
    let mut seed = low_u64(n);
    for _ in 0..RHO_MAX_RESTARTS {
        let y0 = BigUint::from(splitmix(&mut seed)) % n;
        let c = BigUint::from(splitmix(&mut seed)) % n + 1u32;
        if let Some(f) = brent_cycle_big(n, y0, c) {
            return Some(f);
        }
    }
    None
}

fn low_u64(x: &BigUint) -> u64 {
    x.iter_u64_digits().next().unwrap_or(0)
}

fn brent_cycle_big(n: &BigUint, y0: BigUint, c: BigUint) -> Option<BigUint> {
    let step = |y: &BigUint| (y * y + &c) % n;
    let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let one = BigUint::one();
    let mut y = y0;
    let mut r: u64 = 1;
    let mut q = one.clone();
    let mut g = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut used: u64 = 0;
    while g == one && used < RHO_CYCLE_BUDGET {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        used += r;
        let mut k = 0;
        while k < r && g == one && used < RHO_CYCLE_BUDGET {
            ys = y.clone();
            let lim = RHO_BATCH.min(r - k);
            for _ in 0..lim {
                y = step(&y);
                q = q * abs_diff(&x, &y) % n;
            }
            used += lim;
            g = q.gcd(n);
            k += lim;
        }
        r <<= 1;
    }
    if g == *n {
        g = one.clone();
        for _ in 0..RHO_BATCH {
            ys = step(&ys);
            let h = abs_diff(&x, &ys).gcd(n);
            if h > one {
                g = h;
                break;
            }
        }
    }
    if g > one && g < *n {
        Some(g)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_rejects_zero() {
        assert_eq!(factorize(0), Err(ArithError::Zero));
        assert_eq!(factorize_big(&BigUint::zero()), Err(ArithError::Zero));
    }

    #[test]
    fn factorize_one_is_empty() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert!(factorize_big(&BigUint::one()).unwrap().factors().is_empty());
    }

    #[test]
    fn factorize_known_values() {
        assert_eq!(factorize(2).unwrap().factors(), &[(2, 1)]);
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(
            factorize(600851475143).unwrap().factors(),
            &[(71, 1), (839, 1), (1471, 1), (6857, 1)]
        );
        assert_eq!(
            factorize((1 << 61) - 1).unwrap().factors(),
            &[((1 << 61) - 1, 1)]
        );
    }

    #[test]
    fn factorize_large_semiprimes() {
        // Both factors sit far beyond the trial-division range.
        let p = 1_000_000_007u64;
        let q = 1_000_000_009u64;
        assert_eq!(factorize(p * q).unwrap().factors(), &[(p, 1), (q, 1)]);
        let r = 4_294_967_291u64; // largest 32-bit prime
        assert_eq!(factorize(r * r).unwrap().factors(), &[(r, 2)]);
    }

    #[test]
    fn factorize_reassembles_random_inputs() {
        let mut state = 0xfac7_0123u64;
        for _ in 0..2000 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let n = state | 1; // odd, anywhere in u64
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n, "reassembly of {n}");
            for w in f.factors().windows(2) {
                assert!(w[0].0 < w[1].0, "factors out of order for {n}");
            }
            for &(p, _) in f.factors() {
                assert!(is_prime_u64(p), "non-prime factor {p} of {n}");
            }
        }
    }

    #[test]
    fn factorize_is_deterministic() {
        let n = 1_000_000_007u64 * 1_000_000_009;
        assert_eq!(factorize(n).unwrap(), factorize(n).unwrap());
    }

    #[test]
    fn factorize_big_beyond_u64() {
        // 3^50 * 2^10.
        let n = BigUint::from(3u32).pow(50) * BigUint::from(1024u32);
        assert_eq!(
            factorize_big(&n).unwrap().factors(),
            &[(BigUint::from(2u32), 10), (BigUint::from(3u32), 50)]
        );

        // A semiprime past u64 whose factors rho can actually reach.
        let p = BigUint::from(1_000_000_000_039u64);
        let q = BigUint::from(1_000_000_000_061u64);
        let f = factorize_big(&(&p * &q)).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);

        // Squares of primes far beyond rho's reach still factor, via the
        // perfect-power reduction.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert_eq!(
            factorize_big(&(&m89 * &m89)).unwrap().factors(),
            &[(m89, 2)]
        );
    }

    #[test]
    #[ignore = "burns the full rho budget before giving up; takes ~1 min"]
    fn factoring_gives_up_on_balanced_large_semiprimes() {
        // Both prime factors are around 2^61 and 2^89; the smallest is far
        // beyond what the bounded cycle budget can collide on, so the only
        // honest outcome is the give-up error carrying the composite.
        let m61 = BigUint::from((1u64 << 61) - 1);
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let n = &m61 * &m89;
        assert_eq!(
            factorize_big(&n),
            Err(ArithError::FactoringGaveUp {
                cofactor: n.clone()
            })
        );
    }

    #[test]
    fn factorize_big_agrees_with_u64_path() {
        let mut state = 0xb16_cafeu64;
        for _ in 0..50 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let n = state >> 8;
            let small = factorize(n).unwrap();
            let big = factorize_big(&BigUint::from(n)).unwrap();
            assert_eq!(BigFactorization::from(&small), big, "n = {n}");
        }
    }
}
