//! Seeded random instances: even lattices, classes, Kähler data, sheaf
//! profiles and vectors satisfying the fine-moduli conditions.

use std::ops::RangeInclusive;

use mukai_core::stability::{ComplexifiedClass, Factor, FormalSheaf, Torsion};
use mukai_core::{Int, IntersectionLattice, MukaiVector, NsClass, Rat, RatClass};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub fn rng(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

fn det_i64(g: &[Vec<i64>]) -> Int {
    let big: Vec<Vec<Int>> = g.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
    mukai_core::lattice::determinant(&big)
}

fn form_i64(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    (0..x.len())
        .map(|i| (0..y.len()).map(|j| x[i] * g[i][j] * y[j]).sum::<i64>())
        .sum()
}

/// A random even nondegenerate lattice with rank in `ranks`, polarized by
/// a random short vector of positive square.
pub fn even_lattice(g: &mut Gen, ranks: RangeInclusive<usize>) -> IntersectionLattice {
    loop {
        let n = g.gen_range(ranks.clone());
        let mut gram = vec![vec![0i64; n]; n];
        for i in 0..n {
            gram[i][i] = 2 * g.gen_range(-3..=3);
            for j in i + 1..n {
                let x = g.gen_range(-3..=3);
                gram[i][j] = x;
                gram[j][i] = x;
            }
        }
        if det_i64(&gram).is_zero() {
            continue;
        }
        for _ in 0..32 {
            let h: Vec<i64> = (0..n).map(|_| g.gen_range(-2..=2)).collect();
            if form_i64(&gram, &h, &h) > 0 {
                let rows: Vec<&[i64]> = gram.iter().map(|r| r.as_slice()).collect();
                return IntersectionLattice::from_i64(&rows, &h).expect("validated above");
            }
        }
    }
}

pub fn int_class(g: &mut Gen, n: usize, bound: i64) -> NsClass {
    NsClass((0..n).map(|_| Int::from(g.gen_range(-bound..=bound))).collect())
}

pub fn rational(g: &mut Gen, num: i64, den: i64) -> Rat {
    Rat::new(g.gen_range(-num..=num).into(), g.gen_range(1..=den).into())
}

pub fn rat_class(g: &mut Gen, n: usize, num: i64, den: i64) -> RatClass {
    RatClass((0..n).map(|_| rational(g, num, den)).collect())
}

pub fn mukai_vector(g: &mut Gen, n: usize, bound: i64) -> MukaiVector {
    MukaiVector {
        r: g.gen_range(-bound..=bound).into(),
        l: int_class(g, n, bound),
        s: g.gen_range(-bound..=bound).into(),
    }
}

/// Random rational ω in the positive cone (a multiple of the polarization
/// plus a small perturbation) and random rational B.
pub fn kahler(g: &mut Gen, lattice: &IntersectionLattice) -> ComplexifiedClass {
    let n = lattice.rank();
    loop {
        let scale = Rat::from_integer(g.gen_range(1..=4).into());
        let omega = lattice
            .ample()
            .to_rational()
            .scale(&scale)
            .add(&rat_class(g, n, 3, 4).scale(&Rat::new(1.into(), 4.into())));
        let b = rat_class(g, n, 6, 5);
        if let Ok(k) = ComplexifiedClass::new(lattice, b, omega) {
            return k;
        }
    }
}

/// A random HN profile: up to `max_factors` factors with strictly
/// decreasing ω-slopes and an optional torsion part.
pub fn formal_sheaf(g: &mut Gen, lattice: &IntersectionLattice, omega: &RatClass, max_factors: usize) -> FormalSheaf {
    let n = lattice.rank();
    let mut factors: Vec<(Rat, Factor)> = (0..g.gen_range(0..=max_factors))
        .map(|_| {
            let f = Factor::new(g.gen_range(1..=3), int_class(g, n, 4));
            (lattice.slope(&f, omega).expect("positive rank"), f)
        })
        .collect();
    factors.sort_by(|a, b| b.0.cmp(&a.0));
    factors.dedup_by(|a, b| a.0 == b.0);
    let torsion = match g.gen_range(0..3) {
        0 => None,
        1 => Some(Torsion::points(n, g.gen_range(1..=3))),
        _ => Some(Torsion {
            degree: int_class(g, n, 2),
            length: g.gen_range(0..=3).into(),
        }),
    };
    FormalSheaf {
        torsion,
        factors: factors.into_iter().map(|(_, f)| f).collect(),
    }
}

/// v = (r, aℓ, s) with ℓ primitive, a²ℓ² = 2rs, r > 0 and
/// gcd(r, a(ℓ.H), s) = 1, found by factoring a²ℓ²/2. About half the
/// samples have gcd(r, a) > 1 so that a reduction is actually needed.
pub fn fine_moduli_vector(g: &mut Gen, lattice: &IntersectionLattice) -> MukaiVector {
    let n = lattice.rank();
    let want_obstruction = g.gen_bool(0.5);
    loop {
        let l = int_class(g, n, 3);
        if l.is_zero() || !l.content().abs().eq(&Int::from(1)) {
            continue;
        }
        let a = Int::from(g.gen_range(1..=6));
        let l_sq = lattice.square(&l).expect("same rank");
        let big_n = &a * &a * &l_sq / Int::from(2);
        let r = if big_n.is_zero() {
            Int::from(g.gen_range(1..=12))
        } else {
            let m = big_n.abs();
            let divisors: Vec<Int> = (1..=m.clone().try_into().unwrap_or(1_000_000i64).min(10_000))
                .map(Int::from)
                .filter(|d| m.is_multiple_of(d))
                .collect();
            divisors[g.gen_range(0..divisors.len())].clone()
        };
        let s = &big_n / &r;
        let l_dot_h = lattice.intersect(&l, lattice.ample()).expect("same rank");
        if !r.gcd(&(&a * &l_dot_h)).gcd(&s).eq(&Int::from(1)) {
            continue;
        }
        if want_obstruction == r.gcd(&a).eq(&Int::from(1)) {
            continue;
        }
        return MukaiVector { r, l: l.scale(&a), s };
    }
}
