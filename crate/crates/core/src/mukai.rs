//! Mukai vectors on the algebraic Mukai lattice ℤ ⊕ NS ⊕ ℤ.
//!
//! The pairing is ⟨(r,ℓ,s),(r′,ℓ′,s′)⟩ = (ℓ.ℓ′) − r s′ − r′ s, so that
//! χ(E,F) = −⟨v(E),v(F)⟩ and v(O_X) = (1,0,1) is spherical.

use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::{IntersectionLattice, LatticeError, NsClass};
use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MukaiVector {
    pub r: Int,
    pub l: NsClass,
    pub s: Int,
}

impl MukaiVector {
    pub fn new(r: impl Into<Int>, l: NsClass, s: impl Into<Int>) -> Self {
        MukaiVector {
            r: r.into(),
            l,
            s: s.into(),
        }
    }

    /// The class of a closed point, (0,0,1).
    pub fn point(rank: usize) -> Self {
        Self::new(0, NsClass::zero(rank), 1)
    }

    /// v(O_X) = (1,0,1).
    pub fn structure_sheaf(rank: usize) -> Self {
        Self::new(1, NsClass::zero(rank), 1)
    }

    pub fn lattice_rank(&self) -> usize {
        self.l.rank()
    }

    pub fn add(&self, other: &MukaiVector) -> MukaiVector {
        MukaiVector {
            r: &self.r + &other.r,
            l: self.l.add(&other.l),
            s: &self.s + &other.s,
        }
    }

    pub fn neg(&self) -> MukaiVector {
        MukaiVector {
            r: -&self.r,
            l: self.l.neg(),
            s: -&self.s,
        }
    }

    /// Coordinates (r, ℓ₁, …, ℓ_ρ, s).
    pub fn coords(&self) -> alloc::vec::Vec<Int> {
        let mut out = alloc::vec::Vec::with_capacity(self.l.rank() + 2);
        out.push(self.r.clone());
        out.extend(self.l.0.iter().cloned());
        out.push(self.s.clone());
        out
    }

    pub fn from_coords(coords: &[Int]) -> Self {
        let n = coords.len();
        assert!(n >= 2, "Mukai coordinates need at least r and s");
        MukaiVector {
            r: coords[0].clone(),
            l: NsClass(coords[1..n - 1].to_vec()),
            s: coords[n - 1].clone(),
        }
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.l, self.s)
    }
}

/// Rank, first and second Chern class of a sheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernData {
    pub rank: Int,
    pub c1: NsClass,
    pub c2: Int,
}

impl IntersectionLattice {
    pub fn mukai_pair(&self, v: &MukaiVector, w: &MukaiVector) -> Result<Int, LatticeError> {
        let l = self.intersect(&v.l, &w.l)?;
        Ok(l - &v.r * &w.s - &w.r * &v.s)
    }

    /// χ(v, w) = −⟨v, w⟩.
    pub fn euler_chi(&self, v: &MukaiVector, w: &MukaiVector) -> Result<Int, LatticeError> {
        Ok(-self.mukai_pair(v, w)?)
    }

    pub fn mukai_square(&self, v: &MukaiVector) -> Result<Int, LatticeError> {
        self.mukai_pair(v, v)
    }

    pub fn is_spherical(&self, v: &MukaiVector) -> Result<bool, LatticeError> {
        Ok(self.mukai_square(v)? == Int::from(-2))
    }

    pub fn is_isotropic(&self, v: &MukaiVector) -> Result<bool, LatticeError> {
        Ok(self.mukai_square(v)?.is_zero())
    }

    /// v = ch·√td with √td = (1,0,1): (rank, c1, rank + c1²/2 − c2).
    pub fn from_chern(&self, c: &ChernData) -> Result<MukaiVector, LatticeError> {
        let c1_sq = self.square(&c.c1)?;
        // even lattice: c1² is even
        let half = c1_sq / 2;
        Ok(MukaiVector {
            r: c.rank.clone(),
            l: c.c1.clone(),
            s: &c.rank + half - &c.c2,
        })
    }

    pub fn to_chern(&self, v: &MukaiVector) -> Result<ChernData, LatticeError> {
        let half = self.square(&v.l)? / 2;
        Ok(ChernData {
            rank: v.r.clone(),
            c1: v.l.clone(),
            c2: &v.r + half - &v.s,
        })
    }

    /// Evaluates the fine-moduli conditions gcd(r, a(ℓ.H), s) = 1 and
    /// a²(ℓ.ℓ) = 2rs for v = (r, aℓ, s) with ℓ primitive and H the stored
    /// polarization. The caller asserts that H avoids the walls for v; this
    /// is not checked.
    pub fn crucform_check(&self, v: &MukaiVector) -> Result<CrucformReport, LatticeError> {
        self.check_dim(v.l.rank())?;
        let (a, l, found) = match v.l.content_split() {
            Ok((a, l)) => (a, l, true),
            Err(_) => (Int::zero(), NsClass::zero(self.rank()), false),
        };
        let l_dot_h = self.form(&l, self.ample());
        let l_sq = self.form(&l, &l);
        let g = v.r.gcd(&(&a * &l_dot_h)).gcd(&v.s);
        let gcd_condition = g.is_one();
        let dimension_condition = &a * &a * &l_sq == Int::from(2) * &v.r * &v.s;
        Ok(CrucformReport {
            primitive_decomposition: found,
            gcd_condition,
            dimension_condition,
            a,
            l,
            l_dot_h,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrucformReport {
    /// The H²-part was nonzero and split as a·ℓ with ℓ primitive.
    pub primitive_decomposition: bool,
    pub gcd_condition: bool,
    pub dimension_condition: bool,
    pub a: Int,
    pub l: NsClass,
    pub l_dot_h: Int,
}

impl CrucformReport {
    /// Both numerical conditions hold. A zero H²-part is evaluated
    /// literally with a = 0, so the point class (0,0,1) passes.
    pub fn holds(&self) -> bool {
        self.gcd_condition && self.dimension_condition
    }
}

/// gcd(r, a) for v = (r, aℓ, s): the obstruction that the reduction
/// algorithm removes.
pub fn rank_content_gcd(v: &MukaiVector) -> Int {
    v.r.gcd(&v.l.content()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> IntersectionLattice {
        IntersectionLattice::rank_one(1).unwrap()
    }

    fn mv(r: i64, l: &[i64], s: i64) -> MukaiVector {
        MukaiVector::new(r, NsClass::from_i64(l), s)
    }

    #[test]
    fn pairing_examples() {
        let l = h1();
        assert_eq!(l.mukai_pair(&mv(0, &[0], 1), &mv(0, &[0], 1)).unwrap(), Int::from(0));
        assert_eq!(l.mukai_pair(&mv(1, &[0], 1), &mv(1, &[0], 1)).unwrap(), Int::from(-2));
        for s_prime in -5..10 {
            let value = l.mukai_pair(&mv(2, &[1], 0), &mv(9, &[3], s_prime)).unwrap();
            assert_eq!(value, Int::from(6 - 2 * s_prime));
            assert_eq!(value < Int::zero(), s_prime >= 4);
        }
    }

    #[test]
    fn pairing_reproduces_extension_display() {
        // ⟨(r,ℓ,s),(r+r′,ℓ+ℓ′,s′)⟩ = (ℓ.ℓ+ℓ′) − r s′ − (r+r′) s
        let u = IntersectionLattice::hyperbolic_plane();
        let (r, s, r2, s2) = (3i64, -2i64, 5i64, 7i64);
        let l = NsClass::from_i64(&[1, -4]);
        let l2 = NsClass::from_i64(&[2, 3]);
        let sum = l.add(&l2);
        let lhs = u
            .mukai_pair(
                &MukaiVector::new(r, l.clone(), s),
                &MukaiVector::new(r + r2, sum.clone(), s2),
            )
            .unwrap();
        let rhs = u.intersect(&l, &sum).unwrap() - Int::from(r * s2) - Int::from((r + r2) * s);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn euler_examples() {
        let l = h1();
        assert_eq!(l.euler_chi(&mv(1, &[0], 1), &mv(1, &[0], 1)).unwrap(), Int::from(2));
        assert_eq!(l.euler_chi(&mv(0, &[0], 1), &mv(0, &[0], 1)).unwrap(), Int::from(0));
        assert_eq!(l.euler_chi(&mv(2, &[1], 0), &mv(9, &[3], 4)).unwrap(), Int::from(2));
    }

    #[test]
    fn lattice_mismatch() {
        let l = h1();
        assert!(l.mukai_pair(&mv(1, &[0, 0], 1), &mv(1, &[0], 1)).is_err());
    }

    #[test]
    fn chern_examples() {
        let l = h1();
        let o = ChernData {
            rank: 1.into(),
            c1: NsClass::from_i64(&[0]),
            c2: 0.into(),
        };
        assert_eq!(l.from_chern(&o).unwrap(), mv(1, &[0], 1));
        let point = ChernData {
            rank: 0.into(),
            c1: NsClass::from_i64(&[0]),
            c2: (-1).into(),
        };
        assert_eq!(l.from_chern(&point).unwrap(), MukaiVector::point(1));
        let e = ChernData {
            rank: 2.into(),
            c1: NsClass::from_i64(&[1]),
            c2: 1.into(),
        };
        let v = l.from_chern(&e).unwrap();
        assert_eq!(v, mv(2, &[1], 2));
        assert_eq!(l.to_chern(&v).unwrap(), e);
    }

    #[test]
    fn spherical_and_isotropic() {
        let l = h1();
        assert!(l.is_spherical(&mv(1, &[0], 1)).unwrap());
        assert!(l.is_isotropic(&mv(0, &[0], 1)).unwrap());
        // ⟨(2,h,1),(2,h,1)⟩ = 2 − 4
        assert!(l.is_spherical(&mv(2, &[1], 1)).unwrap());
        assert!(!l.is_isotropic(&mv(2, &[1], 1)).unwrap());
    }

    #[test]
    fn crucform_examples() {
        let u = IntersectionLattice::hyperbolic_plane();
        let rep = u.crucform_check(&mv(4, &[2, 2], 1)).unwrap();
        assert!(rep.primitive_decomposition && rep.gcd_condition && rep.dimension_condition);
        assert_eq!(rep.a, Int::from(2));
        assert_eq!(rep.l, NsClass::from_i64(&[1, 1]));
        assert_eq!(rep.l_dot_h, Int::from(3));

        let rep = u.crucform_check(&mv(2, &[2, 2], 2)).unwrap();
        assert!(!rep.gcd_condition);
        assert!(!rep.holds());

        let rep = u.crucform_check(&MukaiVector::point(2)).unwrap();
        assert!(!rep.primitive_decomposition);
        assert_eq!(rep.a, Int::zero());
        assert!(rep.holds());

        // r = a = 0 with s = 0: gcd(0,0,0) = 0
        let rep = u.crucform_check(&mv(0, &[0, 0], 0)).unwrap();
        assert!(!rep.holds());
    }
}
