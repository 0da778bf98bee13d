//! The two Guy-Shanks parametric families.
//!
//! Form 1 takes n = 2p and n + 1 = 3^m * q with q = 3^(m+1) - 4 and
//! p = (3^m * q - 1) / 2; form 2 mirrors it with n = 3^m * q, n + 1 = 2p,
//! q = 3^(m+1) - 10 and p = (3^m * q + 1) / 2.  Whenever p and q are both
//! prime the pair (n, n + 1) really does satisfy sigma(n) = sigma(n + 1):
//! with everything coprime the shared value collapses to the identity
//!
//!   3 (p + 1)  =  (3^(m+1) - 1) / 2 * (q + 1),
//!
//! which holds for the formulas above by construction.  A scan therefore
//! reduces to primality testing of q and then p, with the numbers growing
//! like 3^(2m); past 64 bits the verdicts come from a Baillie-PSW test
//! and are reported as probable rather than proved.

use std::io::Write;

use num_bigint::BigUint;

use crate::arith::{is_probable_prime, BigFactorization};
use crate::exec::Executor;

/// Which of the two parametrizations a candidate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyForm {
    One,
    Two,
}

impl FamilyForm {
    /// The subtrahend in q = 3^(m+1) - c.
    fn offset(self) -> u32 {
        match self {
            FamilyForm::One => 4,
            FamilyForm::Two => 10,
        }
    }

    /// Smallest m giving a positive q.
    pub fn min_m(self) -> u32 {
        match self {
            FamilyForm::One => 1,
            FamilyForm::Two => 2,
        }
    }
}

impl std::fmt::Display for FamilyForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyForm::One => write!(f, "1"),
            FamilyForm::Two => write!(f, "2"),
        }
    }
}

/// How the primality of p and q was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalityStatus {
    /// Both fit in 64 bits, where the test is deterministic.
    Proved,
    /// At least one needed a Baillie-PSW test.
    Probable,
}

impl std::fmt::Display for PrimalityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrimalityStatus::Proved => write!(f, "proved"),
            PrimalityStatus::Probable => write!(f, "probable"),
        }
    }
}

/// The values a single m generates, before any primality testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCandidate {
    pub form: FamilyForm,
    pub m: u32,
    pub q: BigUint,
    pub p: BigUint,
    pub n: BigUint,
    pub n_plus_1: BigUint,
}

/// A member of one of the families: both q and p passed the primality
/// test, so sigma(n) = sigma(n + 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuyShanksHit {
    pub form: FamilyForm,
    pub m: u32,
    pub q: BigUint,
    pub p: BigUint,
    pub n: BigUint,
    pub n_plus_1: BigUint,
    pub status: PrimalityStatus,
}

/// The candidate for a given form and m, or None when m is too small for
/// q to be positive.
pub fn candidate(form: FamilyForm, m: u32) -> Option<FamilyCandidate> {
    if m < form.min_m() {
        return None;
    }
    let three = BigUint::from(3u32);
    let pow_m = three.pow(m);
    let q = &pow_m * &three - form.offset();
    let core = &pow_m * &q;
    let (p, n, n_plus_1) = match form {
        FamilyForm::One => {
            let p = (&core - 1u32) >> 1u32;
            let n = &p << 1u32;
            (p, n, core)
        }
        FamilyForm::Two => {
            let p = (&core + 1u32) >> 1u32;
            let n_plus_1 = &p << 1u32;
            (p, core, n_plus_1)
        }
    };
    Some(FamilyCandidate {
        form,
        m,
        q,
        p,
        n,
        n_plus_1,
    })
}

/// Tests the candidate's q, then p, and promotes it to a hit when both
/// are prime.
pub fn test_candidate(cand: &FamilyCandidate) -> Option<GuyShanksHit> {
    if !is_probable_prime(&cand.q) || !is_probable_prime(&cand.p) {
        return None;
    }
    let status = if cand.p.to_u64_digits().len() <= 1 && cand.q.to_u64_digits().len() <= 1 {
        PrimalityStatus::Proved
    } else {
        PrimalityStatus::Probable
    };
    Some(GuyShanksHit {
        form: cand.form,
        m: cand.m,
        q: cand.q.clone(),
        p: cand.p.clone(),
        n: cand.n.clone(),
        n_plus_1: cand.n_plus_1.clone(),
        status,
    })
}

/// All hits of one form with m in [min_m, max_m], ascending in m.
pub fn scan_family(form: FamilyForm, max_m: u32, exec: &Executor) -> Vec<GuyShanksHit> {
    let ms: Vec<u32> = (form.min_m()..=max_m).collect();
    exec.map(ms, |m| candidate(form, m).as_ref().and_then(test_candidate))
        .into_iter()
        .flatten()
        .collect()
}

/// Hits of both forms, form 1 first, each ascending in m.
pub fn scan_all(max_m: u32, exec: &Executor) -> Vec<GuyShanksHit> {
    let mut hits = scan_family(FamilyForm::One, max_m, exec);
    hits.extend(scan_family(FamilyForm::Two, max_m, exec));
    hits
}

/// Recomputes everything a hit claims: the derived values from (form, m),
/// sigma of both sides through the factorizations 2 * p and 3^m * q, and
/// the closed-form identity 3(p+1) = (3^(m+1)-1)/2 * (q+1).
pub fn verify_hit(hit: &GuyShanksHit) -> bool {
    let Some(cand) = candidate(hit.form, hit.m) else {
        return false;
    };
    if cand.q != hit.q || cand.p != hit.p || cand.n != hit.n || cand.n_plus_1 != hit.n_plus_1 {
        return false;
    }
    if &hit.n + 1u32 != hit.n_plus_1 {
        return false;
    }
    let two_p = BigFactorization::from_sorted(vec![(BigUint::from(2u32), 1), (hit.p.clone(), 1)]);
    let three_m_q =
        BigFactorization::from_sorted(vec![(BigUint::from(3u32), hit.m), (hit.q.clone(), 1)]);
    let sigma_even = two_p.sigma();
    let sigma_odd = three_m_q.sigma();
    if sigma_even != sigma_odd {
        return false;
    }
    let lhs = (&hit.p + 1u32) * 3u32;
    let rhs = ((BigUint::from(3u32).pow(hit.m + 1) - 1u32) >> 1u32) * (&hit.q + 1u32);
    lhs == rhs && lhs == sigma_even
}

/// One CSV row per hit: form,m,q,p,n,status.
pub fn write_hits_csv<W: Write>(mut w: W, hits: &[GuyShanksHit]) -> std::io::Result<()> {
    writeln!(w, "form,m,q,p,n,status")?;
    for h in hits {
        writeln!(w, "{},{},{},{},{},{}", h.form, h.m, h.q, h.p, h.n, h.status)?;
    }
    Ok(())
}
