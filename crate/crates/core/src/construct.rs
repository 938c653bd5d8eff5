//! Numerical data for stable extensions 0 → F → E → G → 0 with
//! μ(E) ≤ β < μ(G): the degree/rank pair (ℓ′, r′) of G, the e-stability
//! threshold for G, and the second Chern bound making χ(F, E) positive.

use alloc::boxed::Box;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::{IntersectionLattice, LatticeError, NsClass};
use crate::mukai::MukaiVector;
use crate::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("hypothesis μ(F) < β violated: μ(F) = {mu}, β = {beta}")]
    SlopeNotBelowBeta { mu: Box<Rat>, beta: Box<Rat> },
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(Int),
    #[error("deg L = {0} is not positive; twist-normalize first")]
    NonPositiveDegree(Rat),
    #[error("twisting degree must be positive, got {0}")]
    NonPositiveTwistDegree(Rat),
    #[error("r′ = {r_prime} is smaller than r = {r}")]
    RankPrimeBelowRank { r: Int, r_prime: Int },
}

/// deg L = ℓ, rk F = r and β with ℓ/r < β. Solutions are searched with
/// r′ ≥ `min_r_prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionProblem {
    pub degree: Rat,
    pub rank: Int,
    pub beta: Rat,
    pub min_r_prime: Int,
}

impl ExtensionProblem {
    pub fn new(degree: Rat, rank: impl Into<Int>, beta: Rat) -> Self {
        ExtensionProblem {
            degree,
            rank: rank.into(),
            beta,
            min_r_prime: Int::one(),
        }
    }

    /// Also require r′ ≥ r, as needed for [`e_threshold`].
    pub fn with_r_prime_at_least_rank(mut self) -> Self {
        self.min_r_prime = self.rank.clone();
        self
    }

    pub fn slope(&self) -> Rat {
        &self.degree / Rat::from_integer(self.rank.clone())
    }

    fn validate(&self) -> Result<(), ConstructError> {
        if !self.rank.is_positive() {
            return Err(ConstructError::NonPositiveRank(self.rank.clone()));
        }
        let mu = self.slope();
        if mu >= self.beta {
            return Err(ConstructError::SlopeNotBelowBeta {
                mu: Box::new(mu),
                beta: Box::new(self.beta.clone()),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSolution {
    /// L′ = L^multiple (before undoing any twist normalization).
    pub multiple: Int,
    /// deg L′.
    pub degree: Rat,
    pub r_prime: Int,
    /// Step-ii e-stability bound, present when r′ ≥ r.
    pub e_min: Option<Rat>,
    /// L and L′ are linearly dependent.
    pub collinear: bool,
    /// Number k of twists by the auxiliary class used to make deg L > 0.
    pub twists: Int,
}

/// (ℓ+ℓ′)/(r+r′) ≤ β < ℓ′/r′, evaluated exactly.
pub fn extension_inequality_holds(degree: &Rat, rank: &Int, degree_prime: &Rat, r_prime: &Int, beta: &Rat) -> bool {
    if !r_prime.is_positive() {
        return false;
    }
    let lhs = (degree + degree_prime) / Rat::from_integer(rank + r_prime);
    let rhs = degree_prime / Rat::from_integer(r_prime.clone());
    lhs <= *beta && *beta < rhs
}

/// Smallest denominator b ≥ 1 for which some a has 0 < a − x·b ≤ ε.
/// Such a/b are exactly the upper fractions met while descending the
/// Stern–Brocot tree towards x, so the first one within ε is minimal.
fn stern_brocot_upper(x: &Rat, eps: &Rat) -> (Int, Int) {
    let (mut lp, mut lq) = (Int::zero(), Int::one());
    let (mut rp, mut rq) = (Int::one(), Int::zero());
    loop {
        let mp = &lp + &rp;
        let mq = &lq + &rq;
        let m = Rat::new(mp.clone(), mq.clone());
        if m > *x {
            let dist = &m * Rat::from_integer(mq.clone()) - x * Rat::from_integer(mq.clone());
            if dist <= *eps {
                return (mp, mq);
            }
            rp = mp;
            rq = mq;
        } else {
            // m ≤ x: on equality keep descending as if x were slightly larger
            lp = mp;
            lq = mq;
        }
    }
}

fn smallest_numerator_above(x: &Rat, b: &Int) -> Int {
    (x * Rat::from_integer(b.clone())).floor().to_integer() + Int::one()
}

/// Solves (ℓ+ℓ′)/(r+r′) ≤ β < ℓ′/r′ with L′ = L^a, returning the minimal
/// r′ ≥ `min_r_prime` and then the minimal ℓ′. Requires ℓ > 0.
pub fn solve_extension_lemma(p: &ExtensionProblem) -> Result<ExtensionSolution, ConstructError> {
    p.validate()?;
    if !p.degree.is_positive() {
        return Err(ConstructError::NonPositiveDegree(p.degree.clone()));
    }
    let x = &p.beta / &p.degree;
    let r = Rat::from_integer(p.rank.clone());
    // ε = x·r − 1 > 0 because ℓ/r < β
    let eps = &x * &r - Rat::one();
    let (mut a, mut b) = stern_brocot_upper(&x, &eps);
    if b < p.min_r_prime {
        b = p.min_r_prime.clone();
        loop {
            a = smallest_numerator_above(&x, &b);
            let dist = Rat::from_integer(a.clone()) - &x * Rat::from_integer(b.clone());
            if dist <= eps {
                break;
            }
            b += 1;
        }
    }
    let degree = &p.degree * Rat::from_integer(a.clone());
    debug_assert!(extension_inequality_holds(&p.degree, &p.rank, &degree, &b, &p.beta));
    let e_min = e_threshold(&p.degree, &p.rank, &degree, &b).ok();
    Ok(ExtensionSolution {
        multiple: a,
        degree,
        r_prime: b,
        e_min,
        collinear: true,
        twists: Int::zero(),
    })
}

/// Twists F by H^k (deg H = `twist_degree`) until deg > 0, solves, and
/// untwists L′ ↦ L′ ⊗ H^{−k r′}.
pub fn solve_extension_lemma_normalized(
    p: &ExtensionProblem,
    twist_degree: &Rat,
) -> Result<ExtensionSolution, ConstructError> {
    p.validate()?;
    if p.degree.is_positive() {
        return solve_extension_lemma(p);
    }
    if !twist_degree.is_positive() {
        return Err(ConstructError::NonPositiveTwistDegree(twist_degree.clone()));
    }
    let r = Rat::from_integer(p.rank.clone());
    // smallest k ≥ 1 with ℓ + r·k·d > 0
    let step = &r * twist_degree;
    let k = (-&p.degree / &step).floor().to_integer() + Int::one();
    let shift = Rat::from_integer(k.clone()) * twist_degree;
    let twisted = ExtensionProblem {
        degree: &p.degree + &r * &shift,
        rank: p.rank.clone(),
        beta: &p.beta + &shift,
        min_r_prime: p.min_r_prime.clone(),
    };
    let sol = solve_extension_lemma(&twisted)?;
    let degree = &sol.degree - Rat::from_integer(sol.r_prime.clone()) * &shift;
    debug_assert!(extension_inequality_holds(
        &p.degree,
        &p.rank,
        &degree,
        &sol.r_prime,
        &p.beta
    ));
    let e_min = e_threshold(&p.degree, &p.rank, &degree, &sol.r_prime).ok();
    Ok(ExtensionSolution {
        multiple: sol.multiple,
        degree,
        r_prime: sol.r_prime,
        e_min,
        collinear: false,
        twists: k,
    })
}

/// e ≥ ((r′r − r)/(r + r′))·(ℓ′/r′ − ℓ/r): G e-stable for such e makes
/// every extension of G by F μ-stable at proper subsheaves meeting G.
pub fn e_threshold(degree: &Rat, rank: &Int, degree_prime: &Rat, r_prime: &Int) -> Result<Rat, ConstructError> {
    if !rank.is_positive() {
        return Err(ConstructError::NonPositiveRank(rank.clone()));
    }
    if r_prime < rank {
        return Err(ConstructError::RankPrimeBelowRank {
            r: rank.clone(),
            r_prime: r_prime.clone(),
        });
    }
    let r = Rat::from_integer(rank.clone());
    let rp = Rat::from_integer(r_prime.clone());
    let coeff = (&rp * &r - &r) / (&r + &rp);
    Ok(coeff * (degree_prime / &rp - degree / &r))
}

/// The combined bound max{step-ii term, ℓ′/r′ − μ₀}, with μ₀ a lower
/// bound for slopes in the bounded family supplied by the caller.
pub fn e_threshold_with_floor(
    degree: &Rat,
    rank: &Int,
    degree_prime: &Rat,
    r_prime: &Int,
    mu0: &Rat,
) -> Result<Rat, ConstructError> {
    let base = e_threshold(degree, rank, degree_prime, r_prime)?;
    let other = degree_prime / Rat::from_integer(r_prime.clone()) - mu0;
    Ok(if other > base { other } else { base })
}

impl IntersectionLattice {
    /// Smallest s′ with ⟨v(F), (r+r′, ℓ+ℓ′, s′)⟩ < 0, i.e. χ(F, E) > 0.
    pub fn bridgerem_sprime(&self, v_f: &MukaiVector, l_prime: &NsClass, r_prime: &Int) -> Result<Int, ConstructError> {
        if !v_f.r.is_positive() {
            return Err(ConstructError::NonPositiveRank(v_f.r.clone()));
        }
        let sum = v_f.l.add(l_prime);
        self.check_dim(l_prime.rank())?;
        let threshold = self.intersect(&v_f.l, &sum)? - (&v_f.r + r_prime) * &v_f.s;
        Ok(threshold.div_floor(&v_f.r) + Int::one())
    }
}
