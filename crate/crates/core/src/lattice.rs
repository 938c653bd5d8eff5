//! Néron–Severi lattices: even nondegenerate integral forms with a
//! distinguished polarization, plus integral and rational classes.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice rank must be positive")]
    EmptyLattice,
    #[error("gram row {row} has {len} entries, expected {rank}")]
    RaggedGram { row: usize, len: usize, rank: usize },
    #[error("gram[{row}][{col}] = {value} but gram[{col}][{row}] = {transposed} (not symmetric)")]
    NotSymmetric {
        row: usize,
        col: usize,
        value: Int,
        transposed: Int,
    },
    #[error("gram[{index}][{index}] = {value} is odd (lattice must be even)")]
    OddDiagonal { index: usize, value: Int },
    #[error("gram matrix is degenerate (determinant 0)")]
    Degenerate,
    #[error("ample class has self-intersection {square}, expected > 0")]
    AmpleNotPositive { square: Int },
    #[error("class has {found} coordinates, lattice rank is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero class has no content")]
    ZeroClass,
}

/// Integral class in the Néron–Severi group, in the coordinates of the
/// lattice basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NsClass(pub Vec<Int>);

/// Class in NS ⊗ ℚ, used for B-fields and Kähler classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatClass(pub Vec<Rat>);

impl NsClass {
    pub fn zero(rank: usize) -> Self {
        NsClass(alloc::vec![Int::zero(); rank])
    }

    pub fn basis(rank: usize, index: usize) -> Self {
        let mut c = Self::zero(rank);
        c.0[index] = Int::one();
        c
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        NsClass(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &NsClass) -> NsClass {
        NsClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &NsClass) -> NsClass {
        NsClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Int) -> NsClass {
        NsClass(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> NsClass {
        NsClass(self.0.iter().map(|a| -a).collect())
    }

    /// gcd of the coordinates; zero for the zero class.
    pub fn content(&self) -> Int {
        self.0.iter().fold(Int::zero(), |g, c| g.gcd(c))
    }

    /// Largest absolute coordinate.
    pub fn sup_norm(&self) -> Int {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn to_rational(&self) -> RatClass {
        RatClass(self.0.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    /// True iff the coordinates have gcd 1.
    pub fn is_primitive(&self) -> Result<bool, LatticeError> {
        if self.is_zero() {
            return Err(LatticeError::ZeroClass);
        }
        Ok(self.content().is_one())
    }

    /// Writes `self = alpha * primitive` with `alpha > 0`.
    pub fn content_split(&self) -> Result<(Int, NsClass), LatticeError> {
        if self.is_zero() {
            return Err(LatticeError::ZeroClass);
        }
        let alpha = self.content();
        let primitive = NsClass(self.0.iter().map(|c| c / &alpha).collect());
        Ok((alpha, primitive))
    }
}

impl RatClass {
    pub fn zero(rank: usize) -> Self {
        RatClass(alloc::vec![Rat::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &RatClass) -> RatClass {
        RatClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatClass) -> RatClass {
        RatClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> RatClass {
        RatClass(self.0.iter().map(|a| a * k).collect())
    }
}

impl From<NsClass> for RatClass {
    fn from(c: NsClass) -> Self {
        c.to_rational()
    }
}

impl fmt::Display for NsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// An even, nondegenerate integral lattice with a polarization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionLattice {
    gram: Vec<Vec<Int>>,
    ample: NsClass,
}

impl IntersectionLattice {
    /// Validates symmetry, evenness, nondegeneracy and positivity of the
    /// polarization. Errors name the first offending entry.
    pub fn new(gram: Vec<Vec<Int>>, ample: NsClass) -> Result<Self, LatticeError> {
        let rank = gram.len();
        if rank == 0 {
            return Err(LatticeError::EmptyLattice);
        }
        for (row, entries) in gram.iter().enumerate() {
            if entries.len() != rank {
                return Err(LatticeError::RaggedGram {
                    row,
                    len: entries.len(),
                    rank,
                });
            }
        }
        for row in 0..rank {
            for col in row + 1..rank {
                if gram[row][col] != gram[col][row] {
                    return Err(LatticeError::NotSymmetric {
                        row,
                        col,
                        value: gram[row][col].clone(),
                        transposed: gram[col][row].clone(),
                    });
                }
            }
        }
        for index in 0..rank {
            if gram[index][index].is_odd() {
                return Err(LatticeError::OddDiagonal {
                    index,
                    value: gram[index][index].clone(),
                });
            }
        }
        if determinant(&gram).is_zero() {
            return Err(LatticeError::Degenerate);
        }
        if ample.rank() != rank {
            return Err(LatticeError::DimensionMismatch {
                expected: rank,
                found: ample.rank(),
            });
        }
        let lattice = IntersectionLattice { gram, ample };
        let square = lattice.form(&lattice.ample, &lattice.ample);
        if !square.is_positive() {
            return Err(LatticeError::AmpleNotPositive { square });
        }
        Ok(lattice)
    }

    pub fn from_i64(gram: &[&[i64]], ample: &[i64]) -> Result<Self, LatticeError> {
        let gram = gram
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(gram, NsClass::from_i64(ample))
    }

    /// The hyperbolic plane U with basis e, f and polarization e + 2f.
    pub fn hyperbolic_plane() -> Self {
        Self::from_i64(&[&[0, 1], &[1, 0]], &[1, 2]).expect("U is valid")
    }

    /// Rank one lattice ℤh with h² = 2n, polarized by h.
    pub fn rank_one(n: u64) -> Result<Self, LatticeError> {
        Self::new(alloc::vec![alloc::vec![Int::from(2 * n)]], NsClass::from_i64(&[1]))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Int>] {
        &self.gram
    }

    pub fn ample(&self) -> &NsClass {
        &self.ample
    }

    pub fn check_dim(&self, found: usize) -> Result<(), LatticeError> {
        if found != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                found,
            });
        }
        Ok(())
    }

    // Unchecked integral form; callers validate dimensions.
    pub(crate) fn form(&self, x: &NsClass, y: &NsClass) -> Int {
        let mut acc = Int::zero();
        for (i, xi) in x.0.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut row = Int::zero();
            for (g, yj) in self.gram[i].iter().zip(&y.0) {
                row += g * yj;
            }
            acc += xi * row;
        }
        acc
    }

    // clearing denominators first keeps the sum in integers, with a single
    // gcd reduction at the end
    pub(crate) fn form_rat(&self, x: &RatClass, y: &RatClass) -> Rat {
        let (xn, xd) = clear_denominators(x);
        let (yn, yd) = clear_denominators(y);
        Rat::new(self.form(&xn, &yn), xd * yd)
    }

    pub(crate) fn form_mixed(&self, x: &NsClass, y: &RatClass) -> Rat {
        let (yn, yd) = clear_denominators(y);
        Rat::new(self.form(x, &yn), yd)
    }

    /// (x.y) for integral classes.
    pub fn intersect(&self, x: &NsClass, y: &NsClass) -> Result<Int, LatticeError> {
        self.check_dim(x.rank())?;
        self.check_dim(y.rank())?;
        Ok(self.form(x, y))
    }

    /// (x.y) for rational classes.
    pub fn intersect_rat(&self, x: &RatClass, y: &RatClass) -> Result<Rat, LatticeError> {
        self.check_dim(x.rank())?;
        self.check_dim(y.rank())?;
        Ok(self.form_rat(x, y))
    }

    pub fn intersect_mixed(&self, x: &NsClass, y: &RatClass) -> Result<Rat, LatticeError> {
        self.check_dim(x.rank())?;
        self.check_dim(y.rank())?;
        Ok(self.form_mixed(x, y))
    }

    pub fn square(&self, x: &NsClass) -> Result<Int, LatticeError> {
        self.intersect(x, x)
    }

    /// ω² > 0 and ω on the same side of the light cone as the polarization.
    /// Wall conditions are not checked.
    pub fn positive_cone_check(&self, omega: &RatClass) -> Result<bool, LatticeError> {
        self.check_dim(omega.rank())?;
        let square = self.form_rat(omega, omega);
        let against_ample = self.form_mixed(&self.ample, omega);
        Ok(square.is_positive() && against_ample.is_positive())
    }
}

/// (d·x, d) with d the least common denominator of x.
fn clear_denominators(x: &RatClass) -> (NsClass, Int) {
    let d = x.0.iter().fold(Int::one(), |d, c| d.lcm(c.denom()));
    let scaled = x.0.iter().map(|c| c.numer() * (&d / c.denom())).collect();
    (NsClass(scaled), d)
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn determinant(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = m.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
