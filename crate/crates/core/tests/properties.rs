use mukai_core::construct::{extension_inequality_holds, solve_extension_lemma, ExtensionProblem};
use mukai_core::isometry::MukaiIsometry;
use mukai_core::lattice::determinant;
use mukai_core::partners::{enumerate_candidates, partner_class_count, Rank1Surface};
use mukai_core::stability::{Beta, ComplexifiedClass, Factor, FormalSheaf, Membership, Torsion};
use mukai_core::{ChernData, Int, IntersectionLattice, MukaiVector, NsClass, Rat, RatClass};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Random even nondegenerate lattice of rank 1..=4 with gram[0][0] > 0,
/// polarized by the first basis vector.
fn lattice() -> impl Strategy<Value = IntersectionLattice> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), 1i64..=3, proptest::collection::vec(-3i64..=3, n * n)))
        .prop_filter_map("degenerate", |(n, d0, raw)| {
            let mut g = vec![vec![Int::zero(); n]; n];
            for i in 0..n {
                for j in i..n {
                    let x = raw[i * n + j];
                    let v = if i == j {
                        if i == 0 {
                            2 * d0
                        } else {
                            2 * x
                        }
                    } else {
                        x
                    };
                    g[i][j] = v.into();
                    g[j][i] = v.into();
                }
            }
            if determinant(&g).is_zero() {
                return None;
            }
            IntersectionLattice::new(g, NsClass::basis(n, 0)).ok()
        })
}

fn class(n: usize, r: i64) -> impl Strategy<Value = NsClass> {
    proptest::collection::vec(-r..=r, n).prop_map(|v| NsClass::from_i64(&v))
}

fn rat_class(n: usize) -> impl Strategy<Value = RatClass> {
    proptest::collection::vec((-20i64..=20, 1i64..=6), n)
        .prop_map(|v| RatClass(v.into_iter().map(|(a, b)| q(a, b)).collect()))
}

fn mukai(n: usize) -> impl Strategy<Value = MukaiVector> {
    (-9i64..=9, class(n, 9), -9i64..=9).prop_map(|(r, l, s)| MukaiVector::new(r, l, s))
}

fn with_vectors(k: usize) -> impl Strategy<Value = (IntersectionLattice, Vec<MukaiVector>)> {
    lattice().prop_flat_map(move |l| {
        let n = l.rank();
        (Just(l), proptest::collection::vec(mukai(n), k))
    })
}

/// Lattice with a complexified class B + iω; ω is the polarization plus
/// a small perturbation, kept only if it stays in the positive cone.
fn with_kahler() -> impl Strategy<Value = (IntersectionLattice, ComplexifiedClass)> {
    lattice()
        .prop_flat_map(|l| {
            let n = l.rank();
            (Just(l), rat_class(n), rat_class(n), 1i64..=8)
        })
        .prop_filter_map("ω outside positive cone", |(l, b, dw, scale)| {
            let omega = l.ample().to_rational().scale(&q(scale, 1)).add(&dw.scale(&q(1, 10)));
            let k = ComplexifiedClass::new(&l, b, omega).ok()?;
            Some((l, k))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intersection_is_bilinear_and_symmetric(
        (l, xs) in lattice().prop_flat_map(|l| { let n = l.rank(); (Just(l), proptest::collection::vec(class(n, 20), 3)) }),
        a in -5i64..=5, b in -5i64..=5,
    ) {
        let (x, y, z) = (&xs[0], &xs[1], &xs[2]);
        prop_assert_eq!(l.intersect(x, y).unwrap(), l.intersect(y, x).unwrap());
        let comb = x.scale(&a.into()).add(&y.scale(&b.into()));
        prop_assert_eq!(
            l.intersect(&comb, z).unwrap(),
            Int::from(a) * l.intersect(x, z).unwrap() + Int::from(b) * l.intersect(y, z).unwrap()
        );
    }

    #[test]
    fn content_split_round_trips(x in proptest::collection::vec(-50i64..=50, 1..6)) {
        let x = NsClass::from_i64(&x);
        prop_assume!(!x.is_zero());
        let (alpha, x0) = x.content_split().unwrap();
        prop_assert!(alpha.is_positive());
        prop_assert_eq!(x0.scale(&alpha), x.clone());
        prop_assert!(x0.is_primitive().unwrap());
    }

    #[test]
    fn positive_cone_is_scale_invariant(
        (l, w) in lattice().prop_flat_map(|l| { let n = l.rank(); (Just(l), rat_class(n)) }),
        num in 1i64..50, den in 1i64..50,
    ) {
        let t = q(num, den);
        prop_assert_eq!(l.positive_cone_check(&w).unwrap(), l.positive_cone_check(&w.scale(&t)).unwrap());
    }

    #[test]
    fn mukai_pairing_laws((l, vs) in with_vectors(3), a in -4i64..=4) {
        let (u, v, w) = (&vs[0], &vs[1], &vs[2]);
        prop_assert_eq!(l.mukai_pair(u, v).unwrap(), l.mukai_pair(v, u).unwrap());
        let scaled = MukaiVector::new(&u.r * a, u.l.scale(&a.into()), &u.s * a);
        prop_assert_eq!(
            l.mukai_pair(&scaled.add(v), w).unwrap(),
            Int::from(a) * l.mukai_pair(u, w).unwrap() + l.mukai_pair(v, w).unwrap()
        );
        prop_assert!(num_integer::Integer::is_even(&l.mukai_square(u).unwrap()));
        prop_assert_eq!(l.euler_chi(u, v).unwrap(), -l.mukai_pair(u, v).unwrap());
    }

    #[test]
    fn chern_round_trip((l, vs) in with_vectors(1), c2 in -30i64..30) {
        let v = &vs[0];
        let c = ChernData { rank: v.r.abs(), c1: v.l.clone(), c2: c2.into() };
        let w = l.from_chern(&c).unwrap();
        prop_assert_eq!(&w.s, &(&c.rank + l.square(&c.c1).unwrap() / 2 - &c.c2));
        prop_assert_eq!(l.to_chern(&w).unwrap(), c);
    }

    #[test]
    fn crucform_implies_isotropic((l, vs) in with_vectors(1)) {
        let v = &vs[0];
        if l.crucform_check(v).unwrap().holds() {
            prop_assert!(l.is_isotropic(v).unwrap());
        }
    }

    #[test]
    fn generators_preserve_pairing(
        (l, vs, c) in with_vectors(2).prop_flat_map(|(l, vs)| { let n = l.rank(); (Just(l), Just(vs), class(n, 6)) })
    ) {
        let (v, w) = (&vs[0], &vs[1]);
        let t = MukaiIsometry::spherical_twist_o(&l);
        let e = MukaiIsometry::line_twist(&l, &c).unwrap();
        for m in [&t, &e] {
            let (mv, mw) = (m.apply(v).unwrap(), m.apply(w).unwrap());
            prop_assert_eq!(l.mukai_pair(&mv, &mw).unwrap(), l.mukai_pair(v, w).unwrap());
            prop_assert_eq!(m.determinant().abs(), Int::one());
            prop_assert!(MukaiIsometry::new(&l, m.matrix().to_vec()).is_ok());
        }
        prop_assert_eq!(t.apply(&t.apply(v).unwrap()).unwrap(), v.clone());
        prop_assert_eq!(&t.apply(v).unwrap().l, &v.l);
        let minus = MukaiIsometry::line_twist(&l, &c.neg()).unwrap();
        prop_assert_eq!(e.invert(), minus);
    }

    #[test]
    fn line_twist_is_a_homomorphism(
        (l, vs, c1, c2) in with_vectors(1).prop_flat_map(|(l, vs)| {
            let n = l.rank(); (Just(l), Just(vs), class(n, 6), class(n, 6))
        })
    ) {
        let a = MukaiIsometry::line_twist(&l, &c1).unwrap();
        let b = MukaiIsometry::line_twist(&l, &c2).unwrap();
        let ab = MukaiIsometry::line_twist(&l, &c1.add(&c2)).unwrap();
        prop_assert_eq!(a.compose(&b).unwrap().apply(&vs[0]).unwrap(), ab.apply(&vs[0]).unwrap());
        prop_assert!(a.compose(&b).unwrap().fixes_point_class());
    }

    #[test]
    fn central_charge_identities((l, k) in with_kahler(), v in any::<u64>()) {
        let n = l.rank();
        let mk = |seed: u64| {
            let f = |i: u64| ((seed >> (i * 5)) % 19) as i64 - 9;
            MukaiVector::new(f(0), NsClass((0..n as u64).map(|i| f(i + 1).into()).collect()), f(7))
        };
        let (x, y) = (mk(v), mk(v.rotate_left(17)));
        let zx = l.central_charge(&k, &x).unwrap();
        prop_assert_eq!(&zx.im, &l.im_z_formula(&k, &x).unwrap());
        let zy = l.central_charge(&k, &y).unwrap();
        prop_assert_eq!(l.central_charge(&k, &x.add(&y)).unwrap(), zx + zy);
        let ids = l.exp_isotropy_identities(&k).unwrap();
        prop_assert!(ids.pairing.0.is_zero() && ids.pairing.1.is_zero());
        prop_assert_eq!(ids.hermitian, k.omega_square() * q(2, 1));
    }

    #[test]
    fn normalize_round_trips((l, k) in with_kahler(), num in 1i64..40, den in 1i64..9) {
        let lambda = q(num, den);
        let w = l.exp_class(&lambda, k.b(), k.omega()).unwrap();
        let form = l.normalize_exponential(&w).unwrap();
        prop_assert_eq!(&form.lambda, &lambda);
        prop_assert_eq!(&form.b, k.b());
        prop_assert_eq!(&form.omega, k.omega());
    }

    #[test]
    fn decompose_conserves_and_rescaling_keeps_memberships(
        (l, k) in with_kahler(),
        raw in proptest::collection::vec((1i64..4, any::<u32>()), 0..5),
        torsion_len in 0i64..3,
        t_num in 1i64..9, t_den in 1i64..9,
    ) {
        let n = l.rank();
        let omega = k.omega().clone();
        // build factors and keep only strictly decreasing slopes
        let mut factors: Vec<(Rat, Factor)> = raw.into_iter().map(|(r, seed)| {
            let c1 = NsClass((0..n).map(|i| Int::from(((seed >> (i * 6)) % 13) as i64 - 6)).collect());
            let f = Factor::new(r, c1);
            (l.slope(&f, &omega).unwrap(), f)
        }).collect();
        factors.sort_by(|a, b| b.0.cmp(&a.0));
        factors.dedup_by(|a, b| a.0 == b.0);
        let sheaf = FormalSheaf {
            torsion: (torsion_len > 0).then(|| Torsion::points(n, torsion_len)),
            factors: factors.into_iter().map(|(_, f)| f).collect(),
        };
        let beta = Beta::Rational(k.beta().clone());
        let (t, f) = l.decompose(&sheaf, &omega, &beta).unwrap();
        prop_assert_eq!(t.rank() + f.rank(), sheaf.rank());
        prop_assert_eq!(t.c1(n).add(&f.c1(n)), sheaf.c1(n));
        prop_assert!(l.in_torsion_class(&t, &omega, &beta).unwrap());
        prop_assert!(l.in_torsion_free_class(&f, &omega, &beta).unwrap());

        // ω ↦ tω with B fixed rescales every slope and β by t
        let s = q(t_num, t_den);
        let k2 = ComplexifiedClass::new(&l, k.b().clone(), omega.scale(&s)).unwrap();
        prop_assert_eq!(k2.beta(), &(k.beta() * &s));
        let beta2 = Beta::Rational(k2.beta().clone());
        prop_assert_eq!(
            l.torsion_pair_membership(&sheaf, &omega, &beta).unwrap(),
            l.torsion_pair_membership(&sheaf, k2.omega(), &beta2).unwrap()
        );
    }

    #[test]
    fn extension_lemma_is_exact_and_minimal(
        l_num in 1i64..30, l_den in 1i64..6, r in 1i64..6,
        gap_num in 1i64..40, gap_den in 1i64..12,
    ) {
        let degree = q(l_num, l_den);
        let beta = &degree / Rat::from_integer(r.into()) + q(gap_num, gap_den);
        let p = ExtensionProblem::new(degree.clone(), r, beta.clone());
        let sol = solve_extension_lemma(&p).unwrap();
        prop_assert!(extension_inequality_holds(&degree, &r.into(), &sol.degree, &sol.r_prime, &beta));
        prop_assert!(sol.collinear);
        let x = &beta / &degree;
        let mut b = Int::one();
        while b < sol.r_prime {
            // the only numerator that can work for this denominator
            let a = (&x * Rat::from_integer(b.clone())).floor().to_integer() + 1;
            prop_assert!(!extension_inequality_holds(&degree, &r.into(), &(&degree * Rat::from_integer(a)), &b, &beta));
            b += 1;
        }
    }

    #[test]
    fn sprime_is_minimal(
        (l, vs, lp) in with_vectors(1).prop_flat_map(|(l, vs)| { let n = l.rank(); (Just(l), Just(vs), class(n, 5)) }),
        rp in 0i64..10,
    ) {
        let mut vf = vs[0].clone();
        vf.r = vf.r.abs() + 1;
        let s = l.bridgerem_sprime(&vf, &lp, &rp.into()).unwrap();
        let e = |s: Int| MukaiVector::new(&vf.r + rp, vf.l.add(&lp), s);
        prop_assert!(l.euler_chi(&vf, &e(s.clone())).unwrap().is_positive());
        prop_assert!(!l.euler_chi(&vf, &e(s - 1)).unwrap().is_positive());
    }

    #[test]
    fn partner_count_matches_enumeration(n in 1u64..5000) {
        let classes = enumerate_candidates(Rank1Surface::new(n).unwrap());
        prop_assert_eq!(classes.len() as u64, partner_class_count(n));
        prop_assert!(classes.iter().all(|c| c.certified));
    }

    #[test]
    fn partner_count_doubles_on_new_prime(m in 2u64..2000, pi in 0usize..6, e in 1u32..3) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        prop_assume!(m % p != 0);
        prop_assert_eq!(partner_class_count(p.pow(e) * m), 2 * partner_class_count(m));
    }
}

#[test]
fn torsion_lands_in_t_for_every_beta() {
    let l = IntersectionLattice::hyperbolic_plane();
    let omega = RatClass(vec![q(1, 1), q(2, 1)]);
    for b in -5..5 {
        let sheaf = FormalSheaf::torsion(Torsion {
            degree: NsClass::from_i64(&[1, 0]),
            length: 0.into(),
        });
        assert_eq!(
            l.torsion_pair_membership(&sheaf, &omega, &Beta::Rational(q(b, 1)))
                .unwrap(),
            Membership::InT
        );
    }
}
