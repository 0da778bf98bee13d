//! The odd-sigma case, settled through the Pell equation x^2 - 2y^2 = +-1.
//!
//! sigma(m) is odd exactly when m is a square or twice a square.  A pair
//! of consecutive integers of those two shapes forces x^2 and 2y^2 to
//! differ by one, so every candidate for a solution with odd sigma sits on
//! a solution of the Pell equation for D = 2.  Those are generated without
//! gaps by the integer recurrence (x, y) -> (x + 2y, x + y) from (1, 1),
//! the numerators and denominators of the continued-fraction convergents
//! of sqrt 2, with the sign of x^2 - 2y^2 alternating.  Checking the
//! handful of pairs below a bound, sigma on both sides computed exactly
//! from the factorizations of x and y, verifies that no odd-sigma solution
//! exists there.

use num_bigint::BigUint;
use num_traits::One;

use crate::arith::{classify_square_form_big, factorize_big, ArithError, SquareForm};
use crate::exec::Executor;

/// One solution of x^2 - 2y^2 = +-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellPair {
    pub x: BigUint,
    pub y: BigUint,
    /// The value of x^2 - 2y^2, always +1 or -1.
    pub sign: i8,
}

impl PellPair {
    /// The candidate n for this pair: the smaller of the two consecutive
    /// values x^2 and 2y^2.
    pub fn n(&self) -> BigUint {
        if self.sign < 0 {
            &self.x * &self.x
        } else {
            (&self.y * &self.y) << 1u32
        }
    }

    pub fn n_plus_1(&self) -> BigUint {
        self.n() + 1u32
    }
}

/// All Pell pairs whose associated n stays within bound_n, in generation
/// order.  The recurrence starts at (1, 1) with sign -1 and every step is
/// re-checked against the defining equation.
pub fn enumerate_pell(bound_n: &BigUint) -> Vec<PellPair> {
    let mut out = Vec::new();
    let mut x = BigUint::one();
    let mut y = BigUint::one();
    let mut expect_sign: i8 = -1;
    loop {
        let xx = &x * &x;
        let yy2 = (&y * &y) << 1u32;
        let sign = if xx < yy2 { -1 } else { 1 };
        let diff = if sign < 0 { &yy2 - &xx } else { &xx - &yy2 };
        assert!(
            diff.is_one(),
            "recurrence left the Pell curve at x={x}, y={y}"
        );
        assert_eq!(
            sign, expect_sign,
            "sign stopped alternating at x={x}, y={y}"
        );
        let n = if sign < 0 { xx } else { yy2 };
        if &n > bound_n {
            break;
        }
        out.push(PellPair {
            x: x.clone(),
            y: y.clone(),
            sign,
        });
        let next_x = &x + (&y << 1u32);
        let next_y = x + y;
        x = next_x;
        y = next_y;
        expect_sign = -expect_sign;
    }
    out
}

/// What the sigma comparison for one pair concluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PellVerdict {
    /// sigma(n) != sigma(n+1): the expected outcome.
    Distinct {
        sigma_n: BigUint,
        sigma_n_plus_1: BigUint,
    },
    /// sigma(n) = sigma(n+1): an odd-sigma solution, which would be news.
    Violation { sigma: BigUint },
    /// One of the factorizations gave up, so the pair is undecided.
    Unresolved { error: ArithError },
}

/// A pair together with its n and the comparison verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellCheck {
    pub pair: PellPair,
    pub n: BigUint,
    pub verdict: PellVerdict,
}

impl PellCheck {
    pub fn is_violation(&self) -> bool {
        matches!(self.verdict, PellVerdict::Violation { .. })
    }

    pub fn is_resolved(&self) -> bool {
        !matches!(self.verdict, PellVerdict::Unresolved { .. })
    }
}

/// sigma of the square of a number, from the factorization of the number
/// itself: exponents double.
fn sigma_of_square(root: &BigUint) -> Result<BigUint, ArithError> {
    Ok(factorize_big(root)?.squared().sigma())
}

/// sigma of twice the square: exponents double, then the power of 2 goes
/// up by one.
fn sigma_of_twice_square(root: &BigUint) -> Result<BigUint, ArithError> {
    Ok(factorize_big(root)?.squared().doubled().sigma())
}

fn check_pair(pair: PellPair) -> PellCheck {
    let n = pair.n();
    let (sigma_n, sigma_n1) = if pair.sign < 0 {
        (sigma_of_square(&pair.x), sigma_of_twice_square(&pair.y))
    } else {
        (sigma_of_twice_square(&pair.y), sigma_of_square(&pair.x))
    };
    let verdict = match (sigma_n, sigma_n1) {
        (Ok(a), Ok(b)) => {
            if a == b {
                assert!(a.bit(0), "matched sigma on a Pell pair must be odd");
                PellVerdict::Violation { sigma: a }
            } else {
                PellVerdict::Distinct {
                    sigma_n: a,
                    sigma_n_plus_1: b,
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => PellVerdict::Unresolved { error: e },
    };
    PellCheck { pair, n, verdict }
}

/// The sigma comparison for every pair with n <= bound_n, in pair order.
pub fn check_pairs(bound_n: &BigUint, exec: &Executor) -> Vec<PellCheck> {
    exec.map(enumerate_pell(bound_n), check_pair)
}

/// The pairs below bound_n that did not come out as expected: violations
/// (sigma equal on both sides) and unresolved factorizations.  An empty
/// result is the confirmation that no odd-sigma solution exists there.
pub fn check_odd_sigma(bound_n: &BigUint, exec: &Executor) -> Vec<PellCheck> {
    check_pairs(bound_n, exec)
        .into_iter()
        .filter(|c| !matches!(c.verdict, PellVerdict::Distinct { .. }))
        .collect()
}

/// The square/twice-square orientation a pair's sign dictates: n and n+1
/// must classify to the two forms in the right order.
pub fn orientation_holds(pair: &PellPair) -> bool {
    let n = pair.n();
    let n1 = pair.n_plus_1();
    if pair.sign < 0 {
        classify_square_form_big(&n) == SquareForm::Square(pair.x.clone())
            && classify_square_form_big(&n1) == SquareForm::TwiceSquare(pair.y.clone())
    } else {
        classify_square_form_big(&n) == SquareForm::TwiceSquare(pair.y.clone())
            && classify_square_form_big(&n1) == SquareForm::Square(pair.x.clone())
    }
}
