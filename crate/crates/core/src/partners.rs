//! Picard rank one: moduli-space candidates M_H(r, ℓ, s) with rs = n and
//! gcd(r, s) = 1 on a K3 surface with Pic = ℤℓ, ℓ² = 2n.

use alloc::vec::Vec;

use num_integer::Integer;

use crate::lattice::{IntersectionLattice, LatticeError, NsClass};
use crate::mukai::MukaiVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rank1Surface {
    n: u64,
}

impl Rank1Surface {
    pub fn new(n: u64) -> Option<Self> {
        (n >= 1).then_some(Rank1Surface { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lattice(&self) -> IntersectionLattice {
        IntersectionLattice::rank_one(self.n).expect("2n > 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartnerCandidate {
    pub r: u64,
    pub s: u64,
}

impl PartnerCandidate {
    pub fn mukai_vector(&self) -> MukaiVector {
        MukaiVector::new(self.r, NsClass::from_i64(&[1]), self.s)
    }
}

/// Candidates identified under the duality (r, s) ↔ (s, r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateClass {
    pub members: Vec<PartnerCandidate>,
    /// Every member passed the fine-moduli test and is isotropic.
    pub certified: bool,
}

/// Distinct prime factors by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn certify(lattice: &IntersectionLattice, c: &PartnerCandidate) -> Result<bool, LatticeError> {
    let v = c.mukai_vector();
    let rep = lattice.crucform_check(&v)?;
    Ok(rep.holds() && rep.a == 1.into() && lattice.is_isotropic(&v)?)
}

/// All coprime factorizations rs = n with r ≥ 1, grouped into swap
/// classes ordered by their smallest r.
pub fn enumerate_candidates(x: Rank1Surface) -> Vec<CandidateClass> {
    let n = x.n;
    let lattice = x.lattice();
    let primes = distinct_prime_factors(n);
    // each coprime split assigns every prime power wholly to r or to s
    let prime_powers: Vec<u64> = primes
        .iter()
        .map(|&p| {
            let mut q = 1;
            let mut m = n;
            while m.is_multiple_of(p) {
                q *= p;
                m /= p;
            }
            q
        })
        .collect();
    let mut rs: Vec<u64> = (0u32..1 << prime_powers.len())
        .map(|mask| {
            prime_powers
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, q)| q)
                .product()
        })
        .collect();
    rs.sort_unstable();
    let mut classes = Vec::new();
    for &r in &rs {
        let s = n / r;
        if r > s {
            continue;
        }
        debug_assert_eq!(r.gcd(&s), 1);
        let mut members = alloc::vec![PartnerCandidate { r, s }];
        if r != s {
            members.push(PartnerCandidate { r: s, s: r });
        }
        let certified = members.iter().all(|c| certify(&lattice, c).unwrap_or(false));
        classes.push(CandidateClass { members, certified });
    }
    classes
}

/// 2^{k−1} for n > 1 with k distinct prime factors, and 1 for n = 1.
pub fn partner_class_count(n: u64) -> u64 {
    let k = distinct_prime_factors(n).len();
    if k == 0 {
        1
    } else {
        1 << (k - 1)
    }
}
