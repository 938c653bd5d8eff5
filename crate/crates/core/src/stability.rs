//! Central charges Z(v) = ⟨v, exp(B+iω)⟩, the torsion pair (T(β), F(β))
//! on numerical HN profiles, membership in the tilted heart, and the
//! period-quadric tests for complex Mukai classes.
//!
//! Sheaves are handled through their numerical shadow: an optional torsion
//! part and the list of (rank, c₁) of the μ-semistable HN factors. All
//! comparisons against β are exact; β may also be an irrational number
//! known only through a rational bracket.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Add;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::isometry::{ComplexMukai, RatMukai};
use crate::lattice::{IntersectionLattice, LatticeError, NsClass, RatClass};
use crate::mukai::MukaiVector;
use crate::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabilityError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("ω is not in the positive cone of the polarization")]
    NotInPositiveCone,
    #[error("HN factor {index} has non-positive rank {rank}")]
    NonPositiveRank { index: usize, rank: Int },
    #[error("HN slopes are not strictly decreasing at factor {index} ({previous} then {next})")]
    SlopesNotDecreasing {
        index: usize,
        previous: Box<Rat>,
        next: Box<Rat>,
    },
    #[error("torsion part has negative length {0}")]
    NegativeLength(Int),
    #[error("sheaf has no torsion-free part, so μ_max/μ_min are undefined")]
    NoTorsionFreePart,
    #[error("β bracket [{lo}, {hi}] is empty")]
    EmptyBracket { lo: Box<Rat>, hi: Box<Rat> },
    #[error("slope {0} falls inside the β bracket; refine the bracket")]
    SlopeInsideBracket(Rat),
}

/// B + iω with ω in the positive cone; caches β = (B.ω) and ω².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexifiedClass {
    b: RatClass,
    omega: RatClass,
    beta: Rat,
    omega_sq: Rat,
}

impl ComplexifiedClass {
    pub fn new(lattice: &IntersectionLattice, b: RatClass, omega: RatClass) -> Result<Self, StabilityError> {
        lattice.check_dim(b.rank())?;
        if !lattice.positive_cone_check(&omega)? {
            return Err(StabilityError::NotInPositiveCone);
        }
        let beta = lattice.intersect_rat(&b, &omega)?;
        let omega_sq = lattice.intersect_rat(&omega, &omega)?;
        Ok(ComplexifiedClass {
            b,
            omega,
            beta,
            omega_sq,
        })
    }

    pub fn b(&self) -> &RatClass {
        &self.b
    }

    pub fn omega(&self) -> &RatClass {
        &self.omega
    }

    pub fn beta(&self) -> &Rat {
        &self.beta
    }

    pub fn omega_square(&self) -> &Rat {
        &self.omega_sq
    }

    /// ω² > 2, which rules out Z(F) ∈ ℝ≤0 for spherical sheaves.
    pub fn stability_valid(&self) -> bool {
        self.omega_sq > Rat::from_integer(2.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralCharge {
    pub re: Rat,
    pub im: Rat,
}

impl Add for CentralCharge {
    type Output = CentralCharge;

    fn add(self, rhs: CentralCharge) -> CentralCharge {
        CentralCharge {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl CentralCharge {
    /// Z ∈ ℝ≤0.
    pub fn is_nonpositive_real(&self) -> bool {
        self.im.is_zero() && !self.re.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase {
    /// Im Z > 0, φ ∈ (0,1). `approx` is for display only.
    Interior { re: Rat, im: Rat, approx: f64 },
    /// Z ∈ ℝ<0, φ = 1.
    Boundary { re: Rat },
    /// Z = 0, Z ∈ ℝ>0 or Im Z < 0: not a nonzero object of the heart.
    Invalid { re: Rat, im: Rat },
}

impl IntersectionLattice {
    /// Z(v) = ((B+iω).ℓ) − s − r(B+iω)²/2.
    pub fn central_charge(&self, k: &ComplexifiedClass, v: &MukaiVector) -> Result<CentralCharge, LatticeError> {
        self.check_dim(v.l.rank())?;
        self.check_dim(k.b.rank())?;
        let r = Rat::from_integer(v.r.clone());
        let s = Rat::from_integer(v.s.clone());
        let lb = self.form_mixed(&v.l, &k.b);
        let lw = self.form_mixed(&v.l, &k.omega);
        let bb = self.form_rat(&k.b, &k.b);
        let half = Rat::new(Int::one(), Int::from(2));
        let re = lb - s - &r * (bb - &k.omega_sq) * half;
        let im = lw - &r * &k.beta;
        Ok(CentralCharge { re, im })
    }

    /// Im Z = (ℓ.ω) − r(B.ω), evaluated directly.
    pub fn im_z_formula(&self, k: &ComplexifiedClass, v: &MukaiVector) -> Result<Rat, LatticeError> {
        Ok(self.intersect_mixed(&v.l, &k.omega)? - Rat::from_integer(v.r.clone()) * &k.beta)
    }

    pub fn phase(&self, k: &ComplexifiedClass, v: &MukaiVector) -> Result<Phase, LatticeError> {
        let z = self.central_charge(k, v)?;
        Ok(classify_phase(z))
    }
}

pub fn classify_phase(z: CentralCharge) -> Phase {
    if z.im.is_positive() {
        let re = z.re.to_f64().unwrap_or(f64::NAN);
        let im = z.im.to_f64().unwrap_or(f64::NAN);
        let approx = libm::atan2(im, re) / core::f64::consts::PI;
        Phase::Interior {
            re: z.re,
            im: z.im,
            approx,
        }
    } else if z.im.is_zero() && z.re.is_negative() {
        Phase::Boundary { re: z.re }
    } else {
        Phase::Invalid { re: z.re, im: z.im }
    }
}

// ---------------------------------------------------------------------------
// β, slopes and HN profiles

/// The tilting parameter β = (B.ω). An irrational β is represented by a
/// bracket lo < β < hi that must separate it from every slope compared
/// against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Beta {
    Rational(Rat),
    Irrational { lo: Rat, hi: Rat },
}

impl Beta {
    pub fn irrational(lo: Rat, hi: Rat) -> Result<Self, StabilityError> {
        if lo >= hi {
            return Err(StabilityError::EmptyBracket {
                lo: Box::new(lo),
                hi: Box::new(hi),
            });
        }
        Ok(Beta::Irrational { lo, hi })
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Beta::Rational(_))
    }

    /// Position of `mu` relative to β.
    pub fn compare_slope(&self, mu: &Rat) -> Result<Ordering, StabilityError> {
        match self {
            Beta::Rational(b) => Ok(mu.cmp(b)),
            Beta::Irrational { lo, hi } => {
                if mu <= lo {
                    Ok(Ordering::Less)
                } else if mu >= hi {
                    Ok(Ordering::Greater)
                } else {
                    Err(StabilityError::SlopeInsideBracket(mu.clone()))
                }
            }
        }
    }
}

impl From<Rat> for Beta {
    fn from(b: Rat) -> Self {
        Beta::Rational(b)
    }
}

/// Torsion part of a sheaf. A zero degree class means it is supported in
/// dimension zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torsion {
    pub degree: NsClass,
    pub length: Int,
}

impl Torsion {
    pub fn points(rank: usize, length: impl Into<Int>) -> Self {
        Torsion {
            degree: NsClass::zero(rank),
            length: length.into(),
        }
    }

    pub fn is_zero_dimensional(&self) -> bool {
        self.degree.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.degree.is_zero() && self.length.is_zero()
    }
}

/// A μ-semistable HN factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub rank: Int,
    pub c1: NsClass,
}

impl Factor {
    pub fn new(rank: impl Into<Int>, c1: NsClass) -> Self {
        Factor { rank: rank.into(), c1 }
    }
}

/// Numerical HN profile: torsion first, then torsion-free factors of
/// strictly decreasing slope.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalSheaf {
    pub torsion: Option<Torsion>,
    pub factors: Vec<Factor>,
}

impl FormalSheaf {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn torsion(t: Torsion) -> Self {
        FormalSheaf {
            torsion: Some(t),
            factors: Vec::new(),
        }
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        FormalSheaf { torsion: None, factors }
    }

    fn has_torsion(&self) -> bool {
        self.torsion.as_ref().is_some_and(|t| !t.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        !self.has_torsion() && self.factors.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        !self.has_torsion()
    }

    pub fn is_pure_torsion(&self) -> bool {
        self.has_torsion() && self.factors.is_empty()
    }

    pub fn rank(&self) -> Int {
        self.factors.iter().map(|f| &f.rank).sum()
    }

    pub fn c1(&self, lattice_rank: usize) -> NsClass {
        let start = match &self.torsion {
            Some(t) => t.degree.clone(),
            None => NsClass::zero(lattice_rank),
        };
        self.factors.iter().fold(start, |acc, f| acc.add(&f.c1))
    }

    pub fn torsion_length(&self) -> Int {
        self.torsion.as_ref().map(|t| t.length.clone()).unwrap_or_default()
    }
}

/// Two-term complex with H⁻¹ and H⁰ given as numerical profiles.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NumericalComplex {
    pub h_minus1: FormalSheaf,
    pub h0: FormalSheaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// The zero sheaf lies in both T(β) and F(β).
    Zero,
    InT,
    InF,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeartViolation {
    TorsionInDegreeMinusOne,
    /// μ_max(H⁻¹) > β.
    SlopeAboveBeta {
        mu_max: Rat,
    },
    /// μ_min(H⁰) ≤ β.
    SlopeNotAboveBeta {
        mu_min: Rat,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeartReport {
    pub h_minus1_in_f: bool,
    pub h0_in_t: bool,
    pub violations: Vec<HeartViolation>,
}

impl HeartReport {
    pub fn is_member(&self) -> bool {
        self.h_minus1_in_f && self.h0_in_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalShape {
    PointClass,
    ShiftedStableSlopeBeta,
    NotMinimalShape,
}

#[derive(Debug, Clone, Copy)]
pub enum MinimalInput<'a> {
    Vector(&'a MukaiVector),
    Complex(&'a NumericalComplex),
}

impl IntersectionLattice {
    /// μ = (c₁.ω)/rk.
    pub fn slope(&self, factor: &Factor, omega: &RatClass) -> Result<Rat, StabilityError> {
        if !factor.rank.is_positive() {
            return Err(StabilityError::NonPositiveRank {
                index: 0,
                rank: factor.rank.clone(),
            });
        }
        Ok(self.intersect_mixed(&factor.c1, omega)? / Rat::from_integer(factor.rank.clone()))
    }

    /// Checks ranks, dimensions and the strict slope ordering; returns the
    /// factor slopes.
    pub fn hn_slopes(&self, sheaf: &FormalSheaf, omega: &RatClass) -> Result<Vec<Rat>, StabilityError> {
        if let Some(t) = &sheaf.torsion {
            self.check_dim(t.degree.rank())?;
            if t.length.is_negative() {
                return Err(StabilityError::NegativeLength(t.length.clone()));
            }
        }
        let mut slopes: Vec<Rat> = Vec::with_capacity(sheaf.factors.len());
        for (index, f) in sheaf.factors.iter().enumerate() {
            if !f.rank.is_positive() {
                return Err(StabilityError::NonPositiveRank {
                    index,
                    rank: f.rank.clone(),
                });
            }
            let mu = self.slope(f, omega)?;
            if let Some(prev) = slopes.last() {
                if *prev <= mu {
                    return Err(StabilityError::SlopesNotDecreasing {
                        index,
                        previous: Box::new(prev.clone()),
                        next: Box::new(mu),
                    });
                }
            }
            slopes.push(mu);
        }
        Ok(slopes)
    }

    pub fn hn_mu_max(&self, sheaf: &FormalSheaf, omega: &RatClass) -> Result<Rat, StabilityError> {
        self.hn_slopes(sheaf, omega)?
            .into_iter()
            .next()
            .ok_or(StabilityError::NoTorsionFreePart)
    }

    pub fn hn_mu_min(&self, sheaf: &FormalSheaf, omega: &RatClass) -> Result<Rat, StabilityError> {
        self.hn_slopes(sheaf, omega)?
            .pop()
            .ok_or(StabilityError::NoTorsionFreePart)
    }

    /// T(β): torsion, or μ_min > β. F(β): torsion free with μ_max ≤ β.
    pub fn torsion_pair_membership(
        &self,
        sheaf: &FormalSheaf,
        omega: &RatClass,
        beta: &Beta,
    ) -> Result<Membership, StabilityError> {
        let slopes = self.hn_slopes(sheaf, omega)?;
        if sheaf.is_zero() {
            return Ok(Membership::Zero);
        }
        let mut above = 0usize;
        for mu in &slopes {
            if beta.compare_slope(mu)? == Ordering::Greater {
                above += 1;
            }
        }
        Ok(if above == slopes.len() {
            Membership::InT
        } else if above == 0 && sheaf.is_torsion_free() {
            Membership::InF
        } else {
            Membership::Neither
        })
    }

    pub fn in_torsion_class(&self, sheaf: &FormalSheaf, omega: &RatClass, beta: &Beta) -> Result<bool, StabilityError> {
        Ok(matches!(
            self.torsion_pair_membership(sheaf, omega, beta)?,
            Membership::Zero | Membership::InT
        ))
    }

    pub fn in_torsion_free_class(
        &self,
        sheaf: &FormalSheaf,
        omega: &RatClass,
        beta: &Beta,
    ) -> Result<bool, StabilityError> {
        Ok(matches!(
            self.torsion_pair_membership(sheaf, omega, beta)?,
            Membership::Zero | Membership::InF
        ))
    }

    /// 0 → T → E → F → 0 with T ∈ T(β), F ∈ F(β): T keeps the torsion and
    /// every factor of slope > β.
    pub fn decompose(
        &self,
        sheaf: &FormalSheaf,
        omega: &RatClass,
        beta: &Beta,
    ) -> Result<(FormalSheaf, FormalSheaf), StabilityError> {
        let slopes = self.hn_slopes(sheaf, omega)?;
        let mut split = 0;
        for mu in &slopes {
            if beta.compare_slope(mu)? == Ordering::Greater {
                split += 1;
            } else {
                break;
            }
        }
        let t_part = FormalSheaf {
            torsion: sheaf.torsion.clone(),
            factors: sheaf.factors[..split].to_vec(),
        };
        let f_part = FormalSheaf::from_factors(sheaf.factors[split..].to_vec());
        Ok((t_part, f_part))
    }

    /// H⁻¹ ∈ F(β) and H⁰ ∈ T(β).
    pub fn heart_membership(
        &self,
        complex: &NumericalComplex,
        omega: &RatClass,
        beta: &Beta,
    ) -> Result<HeartReport, StabilityError> {
        let mut violations = Vec::new();
        let h_minus1_in_f = self.in_torsion_free_class(&complex.h_minus1, omega, beta)?;
        if !h_minus1_in_f {
            if !complex.h_minus1.is_torsion_free() {
                violations.push(HeartViolation::TorsionInDegreeMinusOne);
            }
            if let Ok(mu_max) = self.hn_mu_max(&complex.h_minus1, omega) {
                if beta.compare_slope(&mu_max)? == Ordering::Greater {
                    violations.push(HeartViolation::SlopeAboveBeta { mu_max });
                }
            }
        }
        let h0_in_t = self.in_torsion_class(&complex.h0, omega, beta)?;
        if !h0_in_t {
            let mu_min = self.hn_mu_min(&complex.h0, omega)?;
            violations.push(HeartViolation::SlopeNotAboveBeta { mu_min });
        }
        Ok(HeartReport {
            h_minus1_in_f,
            h0_in_t,
            violations,
        })
    }

    /// Numerical shape test for the minimal objects k(x) and F[1] with
    /// μ(F) = β. Necessary, not sufficient: μ-stability and local freeness
    /// are not numerical.
    pub fn minimal_candidate(
        &self,
        input: MinimalInput<'_>,
        omega: &RatClass,
        beta: &Beta,
    ) -> Result<MinimalShape, StabilityError> {
        match input {
            MinimalInput::Vector(v) => {
                self.check_dim(v.l.rank())?;
                if *v == MukaiVector::point(self.rank()) {
                    return Ok(MinimalShape::PointClass);
                }
                if let (Beta::Rational(b), true) = (beta, v.r.is_negative()) {
                    // v = −v(F) with μ(F) = (−ℓ.ω)/(−r)
                    let mu = self.intersect_mixed(&v.l, omega)? / Rat::from_integer(v.r.clone());
                    if mu == *b {
                        return Ok(MinimalShape::ShiftedStableSlopeBeta);
                    }
                }
                Ok(MinimalShape::NotMinimalShape)
            }
            MinimalInput::Complex(c) => {
                self.hn_slopes(&c.h_minus1, omega)?;
                self.hn_slopes(&c.h0, omega)?;
                let point_shaped = c.h_minus1.is_zero()
                    && c.h0.factors.is_empty()
                    && c.h0
                        .torsion
                        .as_ref()
                        .is_some_and(|t| t.is_zero_dimensional() && t.length.is_one());
                if point_shaped {
                    return Ok(MinimalShape::PointClass);
                }
                if c.h0.is_zero() && c.h_minus1.is_torsion_free() && c.h_minus1.factors.len() == 1 {
                    let mu = self.slope(&c.h_minus1.factors[0], omega)?;
                    if beta.compare_slope(&mu)? == Ordering::Equal {
                        return Ok(MinimalShape::ShiftedStableSlopeBeta);
                    }
                }
                Ok(MinimalShape::NotMinimalShape)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Spherical scan

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalViolation {
    pub v: MukaiVector,
    pub z: CentralCharge,
}

impl IntersectionLattice {
    /// All spherical (r,ℓ,s) with 0 ≤ r ≤ bound, |s| ≤ bound, ℓ in the box
    /// [−bound, bound]^ρ and Z ∈ ℝ≤0, in lexicographic order.
    pub fn spherical_scan(&self, k: &ComplexifiedClass, bound: u32) -> Result<Vec<SphericalViolation>, LatticeError> {
        self.spherical_scan_ranks(k, bound, 0, bound)
    }

    /// The part of [`spherical_scan`](Self::spherical_scan) with
    /// `r_lo ≤ r ≤ r_hi`. Concatenating consecutive rank ranges gives the
    /// full scan in the same order.
    pub fn spherical_scan_ranks(
        &self,
        k: &ComplexifiedClass,
        bound: u32,
        r_lo: u32,
        r_hi: u32,
    ) -> Result<Vec<SphericalViolation>, LatticeError> {
        self.check_dim(k.b.rank())?;
        let rho = self.rank();
        let b = i64::from(bound);
        let side = (2 * b + 1) as u64;
        let total = side.pow(rho as u32);
        let boxed: Vec<NsClass> = (0..total)
            .map(|mut idx| {
                let mut coords = alloc::vec![0i64; rho];
                for slot in coords.iter_mut().rev() {
                    *slot = (idx % side) as i64 - b;
                    idx /= side;
                }
                NsClass::from_i64(&coords)
            })
            .collect();
        let squares: Vec<Int> = boxed.iter().map(|l| self.form(l, l)).collect();
        let mut out = Vec::new();
        for r in r_lo..=r_hi.min(bound) {
            let r_int = Int::from(r);
            for (l, l_sq) in boxed.iter().zip(&squares) {
                // ℓ² − 2rs = −2
                let target = l_sq + Int::from(2);
                let candidates: Vec<Int> = if r == 0 {
                    if target.is_zero() {
                        (-b..=b).map(Int::from).collect()
                    } else {
                        Vec::new()
                    }
                } else {
                    let two_r = Int::from(2) * &r_int;
                    if (&target % &two_r).is_zero() {
                        let s = &target / &two_r;
                        if s.abs() <= Int::from(b) {
                            alloc::vec![s]
                        } else {
                            Vec::new()
                        }
                    } else {
                        Vec::new()
                    }
                };
                for s in candidates {
                    let v = MukaiVector {
                        r: r_int.clone(),
                        l: l.clone(),
                        s,
                    };
                    let z = self.central_charge(k, &v)?;
                    if z.is_nonpositive_real() {
                        out.push(SphericalViolation { v, z });
                    }
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Period quadrics

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricReport {
    /// ⟨x, x⟩ as (re, im).
    pub pairing: (Rat, Rat),
    /// ⟨x, x̄⟩.
    pub hermitian: Rat,
    pub in_q_tilde: bool,
    /// In Q̃ with vanishing degree-0 part.
    pub in_q_prime: bool,
    /// In Q′ with vanishing degree-4 part, i.e. a point of Q ⊂ ℙ(H²).
    pub in_q: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadricClass {
    InQPrime,
    InQTilde,
    Neither,
}

impl QuadricReport {
    pub fn class(&self) -> QuadricClass {
        if self.in_q_prime {
            QuadricClass::InQPrime
        } else if self.in_q_tilde {
            QuadricClass::InQTilde
        } else {
            QuadricClass::Neither
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpIdentities {
    /// ⟨φ, φ⟩ as (re, im); both vanish.
    pub pairing: (Rat, Rat),
    /// ⟨φ, φ̄⟩ = 2(ω.ω).
    pub hermitian: Rat,
}

impl IntersectionLattice {
    pub fn quadric_membership(&self, x: &ComplexMukai) -> Result<QuadricReport, LatticeError> {
        let pairing = self.mukai_pair_complex(x, x)?;
        let hermitian = self.hermitian_norm(x)?;
        let in_q_tilde = pairing.0.is_zero() && pairing.1.is_zero() && hermitian.is_positive();
        let in_q_prime = in_q_tilde && x.re.r.is_zero() && x.im.r.is_zero();
        let in_q = in_q_prime && x.re.s.is_zero() && x.im.s.is_zero();
        Ok(QuadricReport {
            pairing,
            hermitian,
            in_q_tilde,
            in_q_prime,
            in_q,
        })
    }

    pub fn exp_isotropy_identities(&self, k: &ComplexifiedClass) -> Result<ExpIdentities, LatticeError> {
        let phi = self.exp_class(&Rat::one(), &k.b, &k.omega)?;
        Ok(ExpIdentities {
            pairing: self.mukai_pair_complex(&phi, &phi)?,
            hermitian: self.hermitian_norm(&phi)?,
        })
    }
}

/// A real class viewed as a complex one.
pub fn real_class(v: &RatMukai) -> ComplexMukai {
    ComplexMukai {
        re: v.clone(),
        im: RatMukai::zero(v.l.rank()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn h1() -> IntersectionLattice {
        IntersectionLattice::rank_one(1).unwrap()
    }

    fn k1(b: Rat, w: Rat) -> ComplexifiedClass {
        ComplexifiedClass::new(&h1(), RatClass(vec![b]), RatClass(vec![w])).unwrap()
    }

    fn mv(r: i64, l: &[i64], s: i64) -> MukaiVector {
        MukaiVector::new(r, NsClass::from_i64(l), s)
    }

    fn factor(r: i64, c: i64) -> Factor {
        Factor::new(r, NsClass::from_i64(&[c]))
    }

    #[test]
    fn central_charge_examples() {
        let l = h1();
        // rank-one lattice h² = 2: ω = h has ω² = 2
        let k = k1(q(0, 1), q(1, 1));
        assert_eq!(
            l.central_charge(&k, &MukaiVector::point(1)).unwrap(),
            CentralCharge {
                re: q(-1, 1),
                im: q(0, 1)
            }
        );
        assert_eq!(
            l.central_charge(&k, &mv(1, &[0], 1)).unwrap(),
            CentralCharge {
                re: q(0, 1),
                im: q(0, 1)
            }
        );
        assert!(!k.stability_valid());
        let l2 = IntersectionLattice::rank_one(2).unwrap();
        let k2 = ComplexifiedClass::new(&l2, RatClass(vec![q(0, 1)]), RatClass(vec![q(1, 1)])).unwrap();
        assert_eq!(*k2.omega_square(), q(4, 1));
        assert_eq!(
            l2.central_charge(&k2, &mv(1, &[0], 1)).unwrap(),
            CentralCharge {
                re: q(1, 1),
                im: q(0, 1)
            }
        );
        assert!(k2.stability_valid());
    }

    #[test]
    fn im_z_examples() {
        let l = h1();
        let k = k1(q(1, 3), q(2, 1));
        assert_eq!(l.im_z_formula(&k, &MukaiVector::point(1)).unwrap(), q(0, 1));
        // B = h/2, ω = 2h: β = 2 and ℓ = h has (ℓ.ω) = 4 = 2β
        let k = k1(q(1, 2), q(2, 1));
        assert_eq!(l.im_z_formula(&k, &mv(2, &[1], 0)).unwrap(), q(0, 1));
        let k = k1(q(0, 1), q(2, 1));
        assert_eq!(l.im_z_formula(&k, &mv(1, &[1], 0)).unwrap(), q(4, 1));
        for v in [mv(1, &[1], 0), mv(-3, &[5], 2), mv(0, &[0], 1)] {
            assert_eq!(l.central_charge(&k, &v).unwrap().im, l.im_z_formula(&k, &v).unwrap());
        }
    }

    #[test]
    fn phase_examples() {
        let l = h1();
        let k = k1(q(0, 1), q(1, 1));
        assert_eq!(
            l.phase(&k, &MukaiVector::point(1)).unwrap(),
            Phase::Boundary { re: q(-1, 1) }
        );
        assert!(matches!(l.phase(&k, &mv(1, &[0], 1)).unwrap(), Phase::Invalid { .. }));
        let k = k1(q(0, 1), q(2, 1));
        match l.phase(&k, &mv(0, &[1], 0)).unwrap() {
            Phase::Interior { re, im, approx } => {
                assert_eq!(re, q(0, 1));
                assert_eq!(im, q(4, 1));
                assert!((approx - 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Im < 0
        assert!(matches!(l.phase(&k, &mv(0, &[-1], 0)).unwrap(), Phase::Invalid { .. }));
    }

    #[test]
    fn slopes_and_hn() {
        let l = h1();
        let w = RatClass(vec![q(1, 1)]);
        let single = FormalSheaf::from_factors(vec![factor(2, 1)]);
        assert_eq!(l.hn_mu_max(&single, &w).unwrap(), q(1, 1));
        assert_eq!(l.hn_mu_min(&single, &w).unwrap(), q(1, 1));
        let two = FormalSheaf::from_factors(vec![factor(1, 2), factor(1, 0)]);
        assert_eq!(l.hn_mu_max(&two, &w).unwrap(), q(4, 1));
        assert_eq!(l.hn_mu_min(&two, &w).unwrap(), q(0, 1));
        let torsion = FormalSheaf::torsion(Torsion::points(1, 3));
        assert_eq!(l.hn_mu_max(&torsion, &w), Err(StabilityError::NoTorsionFreePart));
        let unordered = FormalSheaf::from_factors(vec![factor(1, 0), factor(1, 2)]);
        assert!(matches!(
            l.hn_slopes(&unordered, &w),
            Err(StabilityError::SlopesNotDecreasing { index: 1, .. })
        ));
        let bad_rank = FormalSheaf::from_factors(vec![factor(0, 2)]);
        assert!(matches!(
            l.hn_slopes(&bad_rank, &w),
            Err(StabilityError::NonPositiveRank { .. })
        ));
    }

    #[test]
    fn torsion_pair_boundaries() {
        let l = h1();
        let w = RatClass(vec![q(1, 1)]);
        let beta = Beta::Rational(q(1, 1));
        let torsion = FormalSheaf::torsion(Torsion::points(1, 1));
        assert_eq!(l.torsion_pair_membership(&torsion, &w, &beta).unwrap(), Membership::InT);
        let at_beta = FormalSheaf::from_factors(vec![factor(2, 1)]);
        assert_eq!(l.torsion_pair_membership(&at_beta, &w, &beta).unwrap(), Membership::InF);
        let straddle = FormalSheaf::from_factors(vec![factor(1, 2), factor(1, 0)]);
        assert_eq!(
            l.torsion_pair_membership(&straddle, &w, &beta).unwrap(),
            Membership::Neither
        );
        // torsion plus a factor of slope ≤ β
        let mixed = FormalSheaf {
            torsion: Some(Torsion::points(1, 1)),
            factors: vec![factor(1, 0)],
        };
        assert_eq!(
            l.torsion_pair_membership(&mixed, &w, &beta).unwrap(),
            Membership::Neither
        );
        assert_eq!(
            l.torsion_pair_membership(&FormalSheaf::zero(), &w, &beta).unwrap(),
            Membership::Zero
        );
    }

    #[test]
    fn decompose_examples() {
        let l = h1();
        let w = RatClass(vec![q(1, 1)]);
        let beta = Beta::Rational(q(1, 1));
        let straddle = FormalSheaf::from_factors(vec![factor(1, 2), factor(1, 0)]);
        let (t, f) = l.decompose(&straddle, &w, &beta).unwrap();
        assert_eq!(t.factors, vec![factor(1, 2)]);
        assert_eq!(f.factors, vec![factor(1, 0)]);
        assert_eq!(t.rank() + f.rank(), straddle.rank());
        assert_eq!(t.c1(1).add(&f.c1(1)), straddle.c1(1));

        let in_t = FormalSheaf::from_factors(vec![factor(1, 3)]);
        let (t, f) = l.decompose(&in_t, &w, &beta).unwrap();
        assert_eq!((t, f), (in_t.clone(), FormalSheaf::zero()));

        let at_beta = FormalSheaf::from_factors(vec![factor(2, 1)]);
        let (t, f) = l.decompose(&at_beta, &w, &beta).unwrap();
        assert_eq!((t, f), (FormalSheaf::zero(), at_beta));
    }

    #[test]
    fn heart_examples() {
        let l = h1();
        let w = RatClass(vec![q(1, 1)]);
        let beta = Beta::Rational(q(1, 1));
        let point = NumericalComplex {
            h_minus1: FormalSheaf::zero(),
            h0: FormalSheaf::torsion(Torsion::points(1, 1)),
        };
        assert!(l.heart_membership(&point, &w, &beta).unwrap().is_member());
        let shifted = NumericalComplex {
            h_minus1: FormalSheaf::from_factors(vec![factor(2, 1)]),
            h0: FormalSheaf::zero(),
        };
        assert!(l.heart_membership(&shifted, &w, &beta).unwrap().is_member());
        let too_steep = NumericalComplex {
            h_minus1: FormalSheaf::from_factors(vec![factor(1, 2)]),
            h0: FormalSheaf::zero(),
        };
        let rep = l.heart_membership(&too_steep, &w, &beta).unwrap();
        assert!(!rep.is_member());
        assert_eq!(rep.violations, vec![HeartViolation::SlopeAboveBeta { mu_max: q(4, 1) }]);
        let bad_h0 = NumericalComplex {
            h_minus1: FormalSheaf::zero(),
            h0: FormalSheaf::from_factors(vec![factor(2, 1)]),
        };
        let rep = l.heart_membership(&bad_h0, &w, &beta).unwrap();
        assert!(rep.h_minus1_in_f && !rep.h0_in_t);
        assert_eq!(
            rep.violations,
            vec![HeartViolation::SlopeNotAboveBeta { mu_min: q(1, 1) }]
        );
        let torsion_below = NumericalComplex {
            h_minus1: FormalSheaf::torsion(Torsion::points(1, 1)),
            h0: FormalSheaf::zero(),
        };
        let rep = l.heart_membership(&torsion_below, &w, &beta).unwrap();
        assert_eq!(rep.violations, vec![HeartViolation::TorsionInDegreeMinusOne]);
    }

    #[test]
    fn minimal_shapes() {
        let l = h1();
        let w = RatClass(vec![q(1, 1)]);
        let beta = Beta::Rational(q(1, 1));
        let point = MukaiVector::point(1);
        assert_eq!(
            l.minimal_candidate(MinimalInput::Vector(&point), &w, &beta).unwrap(),
            MinimalShape::PointClass
        );
        let point_complex = NumericalComplex {
            h_minus1: FormalSheaf::zero(),
            h0: FormalSheaf::torsion(Torsion::points(1, 1)),
        };
        assert_eq!(
            l.minimal_candidate(MinimalInput::Complex(&point_complex), &w, &beta)
                .unwrap(),
            MinimalShape::PointClass
        );
        let shifted = NumericalComplex {
            h_minus1: FormalSheaf::from_factors(vec![factor(2, 1)]),
            h0: FormalSheaf::zero(),
        };
        assert_eq!(
            l.minimal_candidate(MinimalInput::Complex(&shifted), &w, &beta).unwrap(),
            MinimalShape::ShiftedStableSlopeBeta
        );
        // −v(F) for F of rank 2, c₁ = h
        let shifted_v = mv(-2, &[-1], 0);
        assert_eq!(
            l.minimal_candidate(MinimalInput::Vector(&shifted_v), &w, &beta)
                .unwrap(),
            MinimalShape::ShiftedStableSlopeBeta
        );
        let two_points = NumericalComplex {
            h_minus1: FormalSheaf::zero(),
            h0: FormalSheaf::torsion(Torsion::points(1, 2)),
        };
        assert_eq!(
            l.minimal_candidate(MinimalInput::Complex(&two_points), &w, &beta)
                .unwrap(),
            MinimalShape::NotMinimalShape
        );
        // irrational β between 0.9 and 1.1: the shifted shape is unreachable
        let irr = Beta::irrational(q(9, 10), q(11, 10)).unwrap();
        let off = NumericalComplex {
            h_minus1: FormalSheaf::from_factors(vec![factor(1, 0)]),
            h0: FormalSheaf::zero(),
        };
        assert_eq!(
            l.minimal_candidate(MinimalInput::Complex(&off), &w, &irr).unwrap(),
            MinimalShape::NotMinimalShape
        );
        assert_eq!(
            l.minimal_candidate(MinimalInput::Vector(&shifted_v), &w, &irr).unwrap(),
            MinimalShape::NotMinimalShape
        );
        assert_eq!(
            l.minimal_candidate(MinimalInput::Complex(&point_complex), &w, &irr)
                .unwrap(),
            MinimalShape::PointClass
        );
        // a slope inside the bracket cannot be decided
        assert!(matches!(
            l.minimal_candidate(MinimalInput::Complex(&shifted), &w, &irr),
            Err(StabilityError::SlopeInsideBracket(_))
        ));
    }

    #[test]
    fn bracket_validation() {
        assert!(Beta::irrational(q(1, 1), q(1, 1)).is_err());
        let b = Beta::irrational(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(b.compare_slope(&q(0, 1)).unwrap(), Ordering::Less);
        assert_eq!(b.compare_slope(&q(1, 1)).unwrap(), Ordering::Greater);
    }

    #[test]
    fn spherical_scan_examples() {
        // ω² = 4 on h² = 2 is not rational; use h² = 4 with ω = h instead,
        // and h² = 2 with ω = 2h for ω² = 8.
        let l2 = IntersectionLattice::rank_one(2).unwrap();
        let k = ComplexifiedClass::new(&l2, RatClass(vec![q(0, 1)]), RatClass(vec![q(1, 1)])).unwrap();
        assert!(l2.spherical_scan(&k, 10).unwrap().is_empty());
        let l = h1();
        let k = k1(q(0, 1), q(2, 1));
        assert!(l.spherical_scan(&k, 10).unwrap().is_empty());
        let k = k1(q(0, 1), q(1, 1));
        let hits = l.spherical_scan(&k, 3).unwrap();
        assert!(hits.contains(&SphericalViolation {
            v: mv(1, &[0], 1),
            z: CentralCharge {
                re: q(0, 1),
                im: q(0, 1)
            },
        }));
        assert!(l.spherical_scan(&k, 0).unwrap().is_empty());
    }

    #[test]
    fn scan_ranges_concatenate() {
        let u = IntersectionLattice::hyperbolic_plane();
        let k = ComplexifiedClass::new(&u, RatClass(vec![q(0, 1), q(0, 1)]), RatClass(vec![q(1, 1), q(1, 1)])).unwrap();
        let full = u.spherical_scan(&k, 4).unwrap();
        let mut parts = u.spherical_scan_ranks(&k, 4, 0, 1).unwrap();
        parts.extend(u.spherical_scan_ranks(&k, 4, 2, 4).unwrap());
        assert_eq!(full, parts);
        // ω = e + f lies on the wall of e − f: (0, e − f, s) with s ≥ 0 shows up
        assert!(full.iter().any(|h| h.v == mv(0, &[1, -1], 0)));
    }

    #[test]
    fn quadric_examples() {
        let l = h1();
        let k = k1(q(1, 3), q(3, 2));
        let ids = l.exp_isotropy_identities(&k).unwrap();
        assert_eq!(ids.pairing, (q(0, 1), q(0, 1)));
        assert_eq!(ids.hermitian, q(9, 1));

        let x = real_class(&RatMukai::from(&mv(0, &[1], 0)));
        let rep = l.quadric_membership(&x).unwrap();
        assert_eq!(rep.pairing.0, q(2, 1));
        assert_eq!(rep.class(), QuadricClass::Neither);

        let u = IntersectionLattice::hyperbolic_plane();
        let e = real_class(&RatMukai::from(&mv(0, &[1, 0], 0)));
        let rep = u.quadric_membership(&e).unwrap();
        assert_eq!(rep.pairing, (q(0, 1), q(0, 1)));
        assert_eq!(rep.hermitian, q(0, 1));
        assert_eq!(rep.class(), QuadricClass::Neither);

        let phi = l.exp_class(&Rat::one(), k.b(), k.omega()).unwrap();
        assert_eq!(l.quadric_membership(&phi).unwrap().class(), QuadricClass::InQTilde);
        // e₁ + i e₂ on the positive definite diag(2, 2) has no H⁰ or H⁴ part
        let d = IntersectionLattice::from_i64(&[&[2, 0], &[0, 2]], &[1, 0]).unwrap();
        let sigma = ComplexMukai {
            re: RatMukai::from(&mv(0, &[1, 0], 0)),
            im: RatMukai::from(&mv(0, &[0, 1], 0)),
        };
        let rep = d.quadric_membership(&sigma).unwrap();
        assert!(rep.in_q && rep.in_q_prime && rep.in_q_tilde);
        assert_eq!(rep.class(), QuadricClass::InQPrime);
    }
}
