//! Integer arithmetic for the divisor-sum hunt: sigma evaluation, factoring,
//! primality testing, and square-form classification.
//!
//! Throughout, sigma(n) is the sum of all positive divisors of n.  It is
//! multiplicative, and on a prime power sigma(p^e) = 1 + p + ... + p^e, so
//! everything reduces to factoring.  The search range fits comfortably in
//! u64; the family and Pell modules push far beyond 64 bits, so the same
//! operations exist for arbitrary-precision operands as well.

mod factor;
mod primality;

pub use factor::{factorize, factorize_big};
pub use primality::{is_prime_u64, is_probable_prime};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// sigma and factorization are undefined at 0.
    #[error("sigma and factorization are undefined for 0")]
    Zero,
    /// sigma(n) is a well-defined integer but does not fit in u64.
    #[error("sigma({n}) overflows 64 bits")]
    SigmaOverflow { n: u64 },
    /// Pollard rho exhausted its iteration budget on every restart.  The
    /// cofactor is the composite that resisted splitting.
    #[error("factoring gave up; unfactored cofactor {cofactor}")]
    FactoringGaveUp { cofactor: BigUint },
}

/// Prime factorization of a nonzero u64.  Factors are ascending and
/// exponents positive; the factorization of 1 is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub(crate) fn from_sorted(factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Factorization { factors }
    }

    /// (prime, exponent) pairs in ascending prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Multiplies the factorization back together.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    /// sigma of the factored number, or None if the sum exceeds u64.
    pub fn sigma(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.factors {
            // 1 + p + ... + p^e by Horner's rule; checked because the sum
            // can exceed 64 bits even when the number itself does not.
            let mut term: u64 = 1;
            for _ in 0..e {
                term = term.checked_mul(p)?.checked_add(1)?;
            }
            acc = acc.checked_mul(term)?;
        }
        Some(acc)
    }
}

/// Prime factorization of a nonzero arbitrary-precision integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFactorization {
    factors: Vec<(BigUint, u32)>,
}

impl BigFactorization {
    pub(crate) fn from_sorted(factors: Vec<(BigUint, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        BigFactorization { factors }
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// sigma of the factored number.  Never overflows.
    pub fn sigma(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.factors {
            let mut term = BigUint::one();
            for _ in 0..*e {
                term = term * p + 1u32;
            }
            acc *= term;
        }
        acc
    }

    /// Factorization of the square: every exponent doubled.
    pub fn squared(&self) -> BigFactorization {
        BigFactorization {
            factors: self
                .factors
                .iter()
                .map(|(p, e)| (p.clone(), e * 2))
                .collect(),
        }
    }

    /// Factorization of twice the number: the exponent of 2 bumped by one.
    pub fn doubled(&self) -> BigFactorization {
        let two = BigUint::from(2u32);
        let mut factors = self.factors.clone();
        match factors.iter_mut().find(|(p, _)| *p == two) {
            Some((_, e)) => *e += 1,
            None => factors.insert(0, (two, 1)),
        }
        BigFactorization { factors }
    }
}

impl From<&Factorization> for BigFactorization {
    fn from(f: &Factorization) -> Self {
        BigFactorization {
            factors: f
                .factors
                .iter()
                .map(|&(p, e)| (BigUint::from(p), e))
                .collect(),
        }
    }
}

/// Sum of divisors of n.  Errors on n = 0 and when the sum does not fit
/// in 64 bits; factoring a single u64 never gives up in practice.
pub fn sigma(n: u64) -> Result<u64, ArithError> {
    let f = factorize(n)?;
    f.sigma().ok_or(ArithError::SigmaOverflow { n })
}

/// Sum of divisors of an arbitrary-precision n.  Cost is dominated by
/// factoring, so this is only viable when n has no two large prime factors.
pub fn sigma_big(n: &BigUint) -> Result<BigUint, ArithError> {
    Ok(factorize_big(n)?.sigma())
}

/// Whether n is a perfect square, twice a perfect square, or neither.
/// These are exactly the shapes a number with odd sigma can take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareForm<T> {
    /// n = root^2.
    Square(T),
    /// n = 2 * root^2.
    TwiceSquare(T),
    Neither,
}

pub fn classify_square_form(n: u64) -> SquareForm<u64> {
    let r = n.isqrt();
    if r * r == n {
        return SquareForm::Square(r);
    }
    if n.is_multiple_of(2) {
        let h = n / 2;
        let r = h.isqrt();
        if r * r == h {
            return SquareForm::TwiceSquare(r);
        }
    }
    SquareForm::Neither
}

pub fn classify_square_form_big(n: &BigUint) -> SquareForm<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        return SquareForm::Square(r);
    }
    if !n.bit(0) && !n.is_zero() {
        let h: BigUint = n >> 1u32;
        let r = h.sqrt();
        if &r * &r == h {
            return SquareForm::TwiceSquare(r);
        }
    }
    SquareForm::Neither
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Divisor sum by trial division over divisor pairs; the independent
    /// oracle the fast paths are checked against.
    fn sigma_naive(n: u64) -> u64 {
        assert!(n > 0);
        let mut total = 0u64;
        let mut d = 1u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                total += d;
                let q = n / d;
                if q != d {
                    total += q;
                }
            }
            d += 1;
        }
        total
    }

    #[test]
    fn sigma_small_values() {
        let expect = [1u64, 3, 4, 7, 6, 12, 8, 15, 13, 18, 12, 28];
        for (i, &want) in expect.iter().enumerate() {
            assert_eq!(sigma(i as u64 + 1).unwrap(), want, "sigma({})", i + 1);
        }
    }

    #[test]
    fn sigma_matches_naive_oracle() {
        for n in 1..=5000u64 {
            assert_eq!(sigma(n).unwrap(), sigma_naive(n), "sigma({n})");
        }
    }

    #[test]
    fn sigma_known_points() {
        assert_eq!(sigma(14).unwrap(), 24);
        assert_eq!(sigma(15).unwrap(), 24);
        assert_eq!(sigma(206).unwrap(), 312);
        assert_eq!(sigma(957).unwrap(), 1440);
        assert_eq!(sigma(1 << 9).unwrap(), 1023);
        assert_eq!(sigma(2685).unwrap(), 4320);
        assert_eq!(sigma(147454).unwrap(), 221184);
        // 2^61 - 1 is prime.
        assert_eq!(sigma((1 << 61) - 1).unwrap(), 1 << 61);
    }

    #[test]
    fn sigma_rejects_zero() {
        assert_eq!(sigma(0), Err(ArithError::Zero));
    }

    #[test]
    fn sigma_overflow_is_an_error() {
        // sigma(2^62 * 3) = (2^63 - 1) * 4 > u64::MAX.
        let n = (1u64 << 62) * 3;
        assert_eq!(sigma(n), Err(ArithError::SigmaOverflow { n }));
        // The big-integer path has no such ceiling.
        let s = sigma_big(&BigUint::from(n)).unwrap();
        assert_eq!(s, (BigUint::from((1u128 << 63) - 1)) * 4u32);
    }

    #[test]
    fn sigma_is_multiplicative_on_coprime_pairs() {
        let mut state = 0x5eed_0001u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 33
        };
        let mut checked = 0;
        while checked < 200 {
            let a = next() % 1_000_000 + 2;
            let b = next() % 1_000_000 + 2;
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            assert_eq!(
                sigma(a * b).unwrap(),
                sigma(a).unwrap() * sigma(b).unwrap(),
                "sigma({a} * {b})"
            );
            checked += 1;
        }
    }

    #[test]
    fn big_sigma_agrees_with_u64_sigma() {
        for n in [1u64, 2, 360, 147454, 999_999_937, (1 << 61) - 1] {
            assert_eq!(
                sigma_big(&BigUint::from(n)).unwrap(),
                BigUint::from(sigma(n).unwrap())
            );
        }
    }

    #[test]
    fn squared_and_doubled_track_the_value() {
        let f = factorize_big(&BigUint::from(12u32)).unwrap();
        assert_eq!(f.squared().value(), BigUint::from(144u32));
        assert_eq!(f.doubled().value(), BigUint::from(24u32));
        let odd = factorize_big(&BigUint::from(45u32)).unwrap();
        assert_eq!(odd.doubled().value(), BigUint::from(90u32));
        assert_eq!(odd.doubled().sigma(), BigUint::from(234u32));
    }

    #[test]
    fn classify_square_forms() {
        assert_eq!(classify_square_form(1), SquareForm::Square(1));
        assert_eq!(classify_square_form(49), SquareForm::Square(7));
        assert_eq!(classify_square_form(8), SquareForm::TwiceSquare(2));
        assert_eq!(classify_square_form(2), SquareForm::TwiceSquare(1));
        assert_eq!(classify_square_form(12), SquareForm::Neither);
        assert_eq!(classify_square_form(3), SquareForm::Neither);
        assert_eq!(classify_square_form(50), SquareForm::TwiceSquare(5));
    }

    #[test]
    fn classify_square_forms_big() {
        let check = |n: u64| {
            let got = classify_square_form_big(&BigUint::from(n));
            let want = match classify_square_form(n) {
                SquareForm::Square(r) => SquareForm::Square(BigUint::from(r)),
                SquareForm::TwiceSquare(r) => SquareForm::TwiceSquare(BigUint::from(r)),
                SquareForm::Neither => SquareForm::Neither,
            };
            assert_eq!(got, want, "classify({n})");
        };
        for n in 1..2000 {
            check(n);
        }
        // A square far beyond u64: (2^89 - 1)^2.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let sq = &m89 * &m89;
        assert_eq!(
            classify_square_form_big(&sq),
            SquareForm::Square(m89.clone())
        );
        assert_eq!(
            classify_square_form_big(&(&sq << 1)),
            SquareForm::TwiceSquare(m89)
        );
    }
}
