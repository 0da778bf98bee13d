//! sigma-hunt: a toolkit for hunting consecutive integers with equal
//! divisor sums, sigma(n) = sigma(n+1).
//!
//! The workhorse is a segmented multiplicative sieve (`sieve`) driven over
//! arbitrary ranges by `search`.  `analysis` post-processes solution sets
//! (divisibility properties, repeated values, growth fit), `families` scans
//! two explicit parametric families for solutions far beyond sieve range,
//! and `pell` verifies the square/twice-square classification of solutions
//! with odd sigma along the Pell equation x^2 - 2y^2 = +-1.

pub mod analysis;
pub mod arith;
pub mod cli;
pub mod exec;
pub mod families;
pub mod fixtures;
pub mod pell;
pub mod search;
pub mod sieve;
