//! Cohomological Fourier–Mukai actions as isometries of the algebraic
//! Mukai lattice, the coprime reduction of Mukai vectors, and the
//! normalization of images of exp(B+iω).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::lattice::{determinant, IntersectionLattice, LatticeError, NsClass, RatClass};
use crate::mukai::{rank_content_gcd, CrucformReport, MukaiVector};
use crate::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IsometryError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("matrix does not preserve the Mukai pairing")]
    NotIsometric,
}

/// Gram matrix of the Mukai pairing in coordinates (r, ℓ₁..ℓ_ρ, s).
pub fn mukai_gram(lattice: &IntersectionLattice) -> Vec<Vec<Int>> {
    let n = lattice.rank() + 2;
    let mut g = vec![vec![Int::zero(); n]; n];
    g[0][n - 1] = Int::from(-1);
    g[n - 1][0] = Int::from(-1);
    for (i, row) in lattice.gram().iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            g[i + 1][j + 1] = x.clone();
        }
    }
    g
}

/// An integer matrix preserving the Mukai pairing. Acts on column
/// vectors of coordinates (r, ℓ, s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MukaiIsometry {
    matrix: Vec<Vec<Int>>,
}

impl MukaiIsometry {
    /// Rejects matrices with MᵀGM ≠ G. Since G is nondegenerate this also
    /// forces det M = ±1.
    pub fn new(lattice: &IntersectionLattice, matrix: Vec<Vec<Int>>) -> Result<Self, IsometryError> {
        let n = lattice.rank() + 2;
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(IsometryError::Shape {
                rows: matrix.len(),
                cols: matrix.first().map_or(0, Vec::len),
                expected: n,
            });
        }
        let g = mukai_gram(lattice);
        let gm = mat_mul(&g, &matrix);
        let mtgm = mat_mul(&transpose(&matrix), &gm);
        if mtgm != g {
            return Err(IsometryError::NotIsometric);
        }
        Ok(MukaiIsometry { matrix })
    }

    pub fn identity(lattice: &IntersectionLattice) -> Self {
        let n = lattice.rank() + 2;
        let mut m = vec![vec![Int::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Int::one();
        }
        MukaiIsometry { matrix: m }
    }

    /// The shift [1], acting as −1.
    pub fn shift(lattice: &IntersectionLattice) -> Self {
        let mut m = Self::identity(lattice).matrix;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Int::from(-1);
        }
        MukaiIsometry { matrix: m }
    }

    /// Cohomological action of the spherical twist T_O: the reflection
    /// x ↦ x + ⟨x,δ⟩δ in δ = (1,0,1), i.e. (r,ℓ,s) ↦ (−s,ℓ,−r).
    pub fn spherical_twist_o(lattice: &IntersectionLattice) -> Self {
        let n = lattice.rank() + 2;
        let mut m = Self::identity(lattice).matrix;
        m[0][0] = Int::zero();
        m[n - 1][n - 1] = Int::zero();
        m[0][n - 1] = Int::from(-1);
        m[n - 1][0] = Int::from(-1);
        MukaiIsometry { matrix: m }
    }

    /// Multiplication by exp(c):
    /// (r, ℓ, s) ↦ (r, ℓ + r c, s + (c.ℓ) + r (c.c)/2).
    pub fn line_twist(lattice: &IntersectionLattice, c: &NsClass) -> Result<Self, IsometryError> {
        lattice.check_dim(c.rank())?;
        let rho = lattice.rank();
        let n = rho + 2;
        let mut m = Self::identity(lattice).matrix;
        let gc: Vec<Int> = (0..rho)
            .map(|j| {
                lattice.gram()[j]
                    .iter()
                    .zip(&c.0)
                    .fold(Int::zero(), |acc, (g, x)| acc + g * x)
            })
            .collect();
        let half_sq = lattice.form(c, c) / 2;
        for i in 0..rho {
            m[i + 1][0] = c.0[i].clone();
            m[n - 1][i + 1] = gc[i].clone();
        }
        m[n - 1][0] = half_sq;
        Ok(MukaiIsometry { matrix: m })
    }

    pub fn matrix(&self) -> &[Vec<Int>] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn determinant(&self) -> Int {
        determinant(&self.matrix)
    }

    pub fn apply(&self, v: &MukaiVector) -> Result<MukaiVector, IsometryError> {
        let x = v.coords();
        if x.len() != self.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim() - 2,
                found: v.lattice_rank(),
            }
            .into());
        }
        let y: Vec<Int> = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&x).fold(Int::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        Ok(MukaiVector::from_coords(&y))
    }

    /// self ∘ other: apply `other` first.
    pub fn compose(&self, other: &MukaiIsometry) -> Result<MukaiIsometry, IsometryError> {
        if self.dim() != other.dim() {
            return Err(IsometryError::Shape {
                rows: other.dim(),
                cols: other.dim(),
                expected: self.dim(),
            });
        }
        Ok(MukaiIsometry {
            matrix: mat_mul(&self.matrix, &other.matrix),
        })
    }

    pub fn invert(&self) -> MukaiIsometry {
        // determinant ±1 makes the rational inverse integral
        let inv = rational_inverse(&self.matrix).expect("isometries are invertible");
        let matrix = inv
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|q| {
                        debug_assert!(q.is_integer());
                        q.to_integer()
                    })
                    .collect()
            })
            .collect();
        MukaiIsometry { matrix }
    }

    /// Lattice-level isomorphism criterion: M(0,0,1) = (0,0,1).
    pub fn fixes_point_class(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            let expected = if i == n - 1 { Int::one() } else { Int::zero() };
            self.matrix[i][n - 1] == expected
        })
    }
}

fn transpose(m: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = m.len();
    let k = m.first().map_or(0, Vec::len);
    (0..k).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let k = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..k)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(Int::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

fn rational_inverse(m: &[Vec<Int>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rat> = row.iter().map(|x| Rat::from_integer(x.clone())).collect();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(pivot, col);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in 0..2 * n {
                    let sub = &factor * &a[col][j];
                    a[i][j] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

// ---------------------------------------------------------------------------
// Coprime reduction

/// Default sup-norm bound for the twist-class search.
pub const DEFAULT_TWIST_SEARCH_BOUND: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionStep {
    LineTwist(NsClass),
    SphericalTwist,
    /// −1 on cohomology, from replacing T_O⁻¹ by T_O⁻¹[1].
    Shift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionNote {
    /// gcd(r, a) was already 1.
    AlreadyCoprime,
    /// ρ = 1: gcd(r, s) = 1 is part of the rank-one classification.
    PicardRankOne,
    /// Zero H²-part; nothing to reduce.
    DegenerateZeroDivisor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub input: MukaiVector,
    pub vector: MukaiVector,
    pub steps: Vec<ReductionStep>,
    pub note: Option<ReductionNote>,
}

impl Reduction {
    pub fn twist_class(&self) -> Option<&NsClass> {
        self.steps.iter().find_map(|s| match s {
            ReductionStep::LineTwist(c) => Some(c),
            _ => None,
        })
    }

    /// The composite isometry sending `input` to `vector`.
    pub fn isometry(&self, lattice: &IntersectionLattice) -> Result<MukaiIsometry, IsometryError> {
        let mut m = MukaiIsometry::identity(lattice);
        for step in &self.steps {
            let g = match step {
                ReductionStep::LineTwist(c) => MukaiIsometry::line_twist(lattice, c)?,
                ReductionStep::SphericalTwist => MukaiIsometry::spherical_twist_o(lattice),
                ReductionStep::Shift => MukaiIsometry::shift(lattice),
            };
            m = g.compose(&m)?;
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("input violates the fine-moduli conditions (gcd = {gcd_ok}, a²ℓ² = 2rs: {dim_ok})", gcd_ok = .0.gcd_condition, dim_ok = .0.dimension_condition)]
    CrucformViolated(CrucformReport),
    #[error("no primitive twist class within sup-norm {bound} makes rank and divisor coprime")]
    NoTwistClass { bound: u32 },
}

/// Candidates for the twist class ℓ̃: all vectors of sup-norm exactly
/// `k`, in decreasing lexicographic order.
fn shell(rank: usize, k: i64) -> impl Iterator<Item = NsClass> {
    let side = (2 * k + 1) as u64;
    let total = side.pow(rank as u32);
    (0..total).filter_map(move |mut idx| {
        let mut coords = vec![0i64; rank];
        for slot in coords.iter_mut().rev() {
            *slot = k - (idx % side) as i64;
            idx /= side;
        }
        if coords.iter().any(|c| c.abs() == k) {
            Some(NsClass::from_i64(&coords))
        } else {
            None
        }
    })
}

fn independent(a: &NsClass, b: &NsClass) -> bool {
    let n = a.rank();
    (0..n).any(|i| (i + 1..n).any(|j| &a.0[i] * &b.0[j] != &a.0[j] * &b.0[i]))
}

impl IntersectionLattice {
    /// Moves a Mukai vector satisfying the fine-moduli conditions to one
    /// whose rank is coprime to the divisibility of its H²-part, using
    /// ±T_O(exp(ℓ̃)·v). The result has non-negative rank and again
    /// satisfies the fine-moduli conditions.
    pub fn reduce_to_coprime(&self, v: &MukaiVector) -> Result<Reduction, ReduceError> {
        self.reduce_to_coprime_within(v, DEFAULT_TWIST_SEARCH_BOUND)
    }

    pub fn reduce_to_coprime_within(&self, v: &MukaiVector, bound: u32) -> Result<Reduction, ReduceError> {
        let report = self.crucform_check(v)?;
        if !report.holds() {
            return Err(ReduceError::CrucformViolated(report));
        }
        let unchanged = |note| Reduction {
            input: v.clone(),
            vector: v.clone(),
            steps: Vec::new(),
            note: Some(note),
        };
        if v.l.is_zero() {
            return Ok(unchanged(ReductionNote::DegenerateZeroDivisor));
        }
        if rank_content_gcd(v).is_one() {
            return Ok(unchanged(ReductionNote::AlreadyCoprime));
        }
        if self.rank() == 1 {
            return Ok(unchanged(ReductionNote::PicardRankOne));
        }
        let twist_o = MukaiIsometry::spherical_twist_o(self);
        for k in 1..=i64::from(bound) {
            for candidate in shell(self.rank(), k) {
                if !candidate.content().is_one() || !independent(&candidate, &report.l) {
                    continue;
                }
                let twisted = MukaiIsometry::line_twist(self, &candidate)
                    .and_then(|m| m.apply(v))
                    .map_err(|e| match e {
                        IsometryError::Lattice(l) => l,
                        _ => unreachable!("line twist has lattice shape"),
                    })?;
                let mut out = twist_o.apply(&twisted).expect("same shape");
                let mut steps = vec![ReductionStep::LineTwist(candidate), ReductionStep::SphericalTwist];
                if out.r.is_negative() {
                    out = out.neg();
                    steps.push(ReductionStep::Shift);
                }
                // a coprime image can still break the fine-moduli gcd for a
                // fixed H, so both are required
                if rank_content_gcd(&out).is_one() && self.crucform_check(&out)?.holds() {
                    return Ok(Reduction {
                        input: v.clone(),
                        vector: out,
                        steps,
                        note: None,
                    });
                }
            }
        }
        Err(ReduceError::NoTwistClass { bound })
    }
}

// ---------------------------------------------------------------------------
// Rational and complex Mukai classes

/// A Mukai-lattice class with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMukai {
    pub r: Rat,
    pub l: RatClass,
    pub s: Rat,
}

impl RatMukai {
    pub fn zero(rank: usize) -> Self {
        RatMukai {
            r: Rat::zero(),
            l: RatClass::zero(rank),
            s: Rat::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.l.is_zero() && self.s.is_zero()
    }

    pub fn scale(&self, k: &Rat) -> RatMukai {
        RatMukai {
            r: &self.r * k,
            l: self.l.scale(k),
            s: &self.s * k,
        }
    }
}

impl From<&MukaiVector> for RatMukai {
    fn from(v: &MukaiVector) -> Self {
        RatMukai {
            r: Rat::from_integer(v.r.clone()),
            l: v.l.to_rational(),
            s: Rat::from_integer(v.s.clone()),
        }
    }
}

/// A class in H̃(X, ℚ) ⊗ ℂ, stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexMukai {
    pub re: RatMukai,
    pub im: RatMukai,
}

impl IntersectionLattice {
    pub fn mukai_pair_rat(&self, v: &RatMukai, w: &RatMukai) -> Result<Rat, LatticeError> {
        Ok(self.intersect_rat(&v.l, &w.l)? - &v.r * &w.s - &w.r * &v.s)
    }

    /// Complex-bilinear pairing ⟨x, y⟩ as (re, im).
    pub fn mukai_pair_complex(&self, x: &ComplexMukai, y: &ComplexMukai) -> Result<(Rat, Rat), LatticeError> {
        let re = self.mukai_pair_rat(&x.re, &y.re)? - self.mukai_pair_rat(&x.im, &y.im)?;
        let im = self.mukai_pair_rat(&x.re, &y.im)? + self.mukai_pair_rat(&x.im, &y.re)?;
        Ok((re, im))
    }

    /// ⟨x, x̄⟩, which is real.
    pub fn hermitian_norm(&self, x: &ComplexMukai) -> Result<Rat, LatticeError> {
        Ok(self.mukai_pair_rat(&x.re, &x.re)? + self.mukai_pair_rat(&x.im, &x.im)?)
    }

    /// λ·exp(B + iω) = (λ, λ(B+iω), λ(B+iω)²/2).
    pub fn exp_class(&self, lambda: &Rat, b: &RatClass, omega: &RatClass) -> Result<ComplexMukai, LatticeError> {
        let bb = self.intersect_rat(b, b)?;
        let ww = self.intersect_rat(omega, omega)?;
        let bw = self.intersect_rat(b, omega)?;
        let half = Rat::new(1.into(), 2.into());
        Ok(ComplexMukai {
            re: RatMukai {
                r: lambda.clone(),
                l: b.scale(lambda),
                s: (bb - ww) * &half * lambda,
            },
            im: RatMukai {
                r: Rat::zero(),
                l: omega.scale(lambda),
                s: bw * lambda,
            },
        })
    }
}

/// λ·exp(B + iω) with λ > 0 and ω in the positive cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentialForm {
    pub lambda: Rat,
    pub b: RatClass,
    pub omega: RatClass,
}

impl ExponentialForm {
    pub fn to_complex(&self, lattice: &IntersectionLattice) -> Result<ComplexMukai, LatticeError> {
        lattice.exp_class(&self.lambda, &self.b, &self.omega)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("degree-0 component has nonzero imaginary part {0}")]
    NonRealDegreeZero(Rat),
    #[error("degree-0 component {0} is not positive")]
    NonPositiveDegreeZero(Rat),
    #[error("degree-4 component is not w₂²/(2λ): expected {expected_re} + {expected_im}i")]
    QuadraticInconsistency {
        expected_re: Box<Rat>,
        expected_im: Box<Rat>,
    },
    #[error("normalized ω is not in the positive cone of the polarization")]
    NotInPositiveCone,
}

impl IntersectionLattice {
    /// Writes an isotropic class w as λ·exp(B′ + iω′).
    pub fn normalize_exponential(&self, w: &ComplexMukai) -> Result<ExponentialForm, NormalizeError> {
        self.check_dim(w.re.l.rank())?;
        self.check_dim(w.im.l.rank())?;
        if !w.im.r.is_zero() {
            return Err(NormalizeError::NonRealDegreeZero(w.im.r.clone()));
        }
        let lambda = w.re.r.clone();
        if !lambda.is_positive() {
            return Err(NormalizeError::NonPositiveDegreeZero(lambda));
        }
        let inv = lambda.recip();
        let b = w.re.l.scale(&inv);
        let omega = w.im.l.scale(&inv);
        let expected = self.exp_class(&lambda, &b, &omega)?;
        if expected.re.s != w.re.s || expected.im.s != w.im.s {
            return Err(NormalizeError::QuadraticInconsistency {
                expected_re: Box::new(expected.re.s),
                expected_im: Box::new(expected.im.s),
            });
        }
        if !self.positive_cone_check(&omega)? {
            return Err(NormalizeError::NotInPositiveCone);
        }
        Ok(ExponentialForm { lambda, b, omega })
    }
}
