//! Randomized invariant checks shared by `mukai selftest` and the
//! acceptance suite. Each check runs `count` seeded instances and reports
//! the first counterexample it finds.

use mukai_core::construct::{solve_extension_lemma, ExtensionProblem};
use mukai_core::isometry::MukaiIsometry;
use mukai_core::mukai::rank_content_gcd;
use mukai_core::partners::{enumerate_candidates, partner_class_count, Rank1Surface};
use mukai_core::stability::{Beta, ComplexifiedClass, Factor, FormalSheaf, Membership, Torsion};
use mukai_core::{Int, IntersectionLattice, MukaiVector, NsClass, Rat, RatClass};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::oracle;
use crate::random::{self, Gen};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub passed: bool,
    pub detail: String,
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: 0,
            first: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn finish(self) -> CheckResult {
        let detail = match &self.first {
            None => format!("{} cases, 0 failures", self.cases),
            Some(f) => format!("{} cases, {} failures; first: {f}", self.cases, self.failures),
        };
        CheckResult {
            name: self.name,
            cases: self.cases,
            passed: self.failures == 0,
            detail,
        }
    }
}

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// ⟨(r,ℓ,s),(r+r′,ℓ+ℓ′,s′)⟩ = (ℓ.ℓ+ℓ′) − rs′ − (r+r′)s.
pub fn pairing_convention(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("pairing-convention");
    for _ in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let n = l.rank();
        let v = random::mukai_vector(g, n, 20);
        let rp = Int::from(g.gen_range(-20..=20));
        let lp = random::int_class(g, n, 20);
        let sp = Int::from(g.gen_range(-20..=20));
        let w = MukaiVector {
            r: &v.r + &rp,
            l: v.l.add(&lp),
            s: sp.clone(),
        };
        let lhs = l.mukai_pair(&v, &w).expect("same rank");
        let rhs = l.intersect(&v.l, &v.l.add(&lp)).expect("same rank") - &v.r * &sp - (&v.r + &rp) * &v.s;
        t.check(lhs == rhs, || format!("v = {v}, w = {w}: {lhs} ≠ {rhs}"));
    }
    t.finish()
}

/// Im Z(v) = (ℓ.ω) − r(B.ω).
pub fn im_z_identity(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("im-z-identity");
    for _ in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let k = random::kahler(g, &l);
        let v = random::mukai_vector(g, l.rank(), 15);
        let z = l.central_charge(&k, &v).expect("same rank");
        let expected = l.intersect_mixed(&v.l, k.omega()).expect("same rank")
            - Rat::from_integer(v.r.clone()) * l.intersect_rat(k.b(), k.omega()).expect("same rank");
        t.check(z.im == expected, || format!("v = {v}: Im Z = {} ≠ {expected}", z.im));
    }
    t.finish()
}

/// T_O is a pairing-preserving involution fixing H²; exp(c) is additive
/// in c; both preserve isotropy and sphericity.
pub fn isometry_suite(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("isometry-suite");
    for i in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let n = l.rank();
        let v = if i % 4 == 0 {
            // a spherical or isotropic class, so the flags are not all false
            let c = random::int_class(g, n, 3);
            let base = if i % 8 == 0 {
                MukaiVector::structure_sheaf(n)
            } else {
                MukaiVector::point(n)
            };
            MukaiIsometry::line_twist(&l, &c).unwrap().apply(&base).unwrap()
        } else {
            random::mukai_vector(g, n, 12)
        };
        let w = random::mukai_vector(g, n, 12);
        let c1 = random::int_class(g, n, 5);
        let c2 = random::int_class(g, n, 5);
        let tw = MukaiIsometry::spherical_twist_o(&l);
        let e1 = MukaiIsometry::line_twist(&l, &c1).unwrap();
        let e2 = MukaiIsometry::line_twist(&l, &c2).unwrap();
        let e12 = MukaiIsometry::line_twist(&l, &c1.add(&c2)).unwrap();
        let pair = |a: &MukaiVector, b: &MukaiVector| l.mukai_pair(a, b).unwrap();
        let flags = |x: &MukaiVector| (l.is_isotropic(x).unwrap(), l.is_spherical(x).unwrap());
        let tv = tw.apply(&v).unwrap();
        let ev = e1.apply(&v).unwrap();
        let ok = pair(&tv, &tw.apply(&w).unwrap()) == pair(&v, &w)
            && tw.apply(&tv).unwrap() == v
            && tv.l == v.l
            && pair(&ev, &e1.apply(&w).unwrap()) == pair(&v, &w)
            && e1.apply(&e2.apply(&v).unwrap()).unwrap() == e12.apply(&v).unwrap()
            && flags(&tv) == flags(&v)
            && flags(&ev) == flags(&v);
        t.check(ok, || format!("v = {v}, w = {w}, c1 = {:?}, c2 = {:?}", c1.0, c2.0));
    }
    t.finish()
}

/// reduce_to_coprime on random fine-moduli vectors over rank 2..4
/// lattices: coprime rank and divisor, isotropic, fine-moduli conditions
/// preserved, and the reported isometry maps input to output.
pub fn reduction(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("reduction");
    let mut nontrivial = 0;
    for _ in 0..count {
        let l = random::even_lattice(g, 2..=4);
        let v = random::fine_moduli_vector(g, &l);
        match l.reduce_to_coprime(&v) {
            Ok(red) => {
                if !red.steps.is_empty() {
                    nontrivial += 1;
                }
                let w = &red.vector;
                let coprime = rank_content_gcd(w).is_one();
                let isotropic = l.is_isotropic(w).unwrap();
                let crucform = l.crucform_check(w).unwrap().holds();
                let traced = red.isometry(&l).unwrap().apply(&v).unwrap() == *w;
                t.check(coprime && isotropic && crucform && traced, || {
                    format!(
                        "v = {v} ↦ {w} on gram {:?}, H = {:?}: coprime {coprime}, isotropic {isotropic}, \
                         crucform {crucform}, traced {traced}",
                        l.gram(),
                        l.ample().0
                    )
                });
            }
            Err(e) => t.check(false, || format!("v = {v}: {e}")),
        }
    }
    let mut r = t.finish();
    r.detail.push_str(&format!(" ({nontrivial} needed a twist)"));
    r
}

/// Solver output satisfies (ℓ+ℓ′)/(r+r′) ≤ β < ℓ′/r′ exactly and matches the first solution
/// of a brute-force scan over r′ up to the returned value.
pub fn extension_lemma(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("extension-lemma");
    for i in 0..count {
        let degree = q(g.gen_range(1..=30), g.gen_range(1..=6));
        let r = g.gen_range(1..=6i64);
        let beta = &degree / Rat::from_integer(r.into()) + q(g.gen_range(1..=40), g.gen_range(1..=15));
        let mut p = ExtensionProblem::new(degree.clone(), r, beta.clone());
        let floor = if i % 2 == 1 {
            p = p.with_r_prime_at_least_rank();
            r
        } else {
            1
        };
        let sol = match solve_extension_lemma(&p) {
            Ok(s) => s,
            Err(e) => {
                t.check(false, || format!("(ℓ, r, β) = ({degree}, {r}, {beta}): {e}"));
                continue;
            }
        };
        let (a, rp): (i64, i64) = match (sol.multiple.clone().try_into(), sol.r_prime.clone().try_into()) {
            (Ok(a), Ok(rp)) => (a, rp),
            _ => {
                t.check(false, || "solution out of range".into());
                continue;
            }
        };
        let exact = oracle::extension_inequality(&degree, r, a, rp, &beta)
            && sol.degree == &degree * Rat::from_integer(a.into());
        let brute = oracle::extension_search(&degree, r, &beta, floor, rp);
        t.check(exact && brute == Some((a, rp)), || {
            format!("(ℓ, r, β) = ({degree}, {r}, {beta}), r′ ≥ {floor}: solver ({a}, {rp}), brute force {brute:?}")
        });
    }
    t.finish()
}

/// The lattices and Kähler classes used for the desk-scale spherical scan:
/// (label, lattice, ω) with ω² ∈ {4, 6, 8}.
pub fn scan_cases() -> Vec<(&'static str, IntersectionLattice, RatClass)> {
    let h = |n: u64| IntersectionLattice::rank_one(n).unwrap();
    let u = IntersectionLattice::hyperbolic_plane();
    let w = |xs: &[i64]| NsClass::from_i64(xs).to_rational();
    vec![
        ("h²=4, ω=h", h(2), w(&[1])),
        ("h²=6, ω=h", h(3), w(&[1])),
        ("h²=8, ω=h", h(4), w(&[1])),
        ("h²=2, ω=2h", h(1), w(&[2])),
        ("U, ω=e+2f", u.clone(), w(&[1, 2])),
        ("U, ω=e+3f", u.clone(), w(&[1, 3])),
        ("U, ω=e+4f", u, w(&[1, 4])),
    ]
}

/// No spherical class with Z ∈ ℝ≤0 for B = 0 and ω² > 2; at ω² = 2 the
/// structure sheaf (1, 0, 1) has Z = 0.
pub fn spherical_scan(bound: u32) -> CheckResult {
    let mut t = Tally::new("spherical-scan");
    for (label, l, omega) in scan_cases() {
        let k = ComplexifiedClass::new(&l, RatClass::zero(l.rank()), omega).unwrap();
        let hits = l.spherical_scan(&k, bound).unwrap();
        t.check(hits.is_empty() && k.stability_valid(), || {
            format!("{label}: {} violations, first {}", hits.len(), hits[0].v)
        });
    }
    let witnesses = [
        (
            "h²=2, ω=h",
            IntersectionLattice::rank_one(1).unwrap(),
            NsClass::from_i64(&[1]),
        ),
        (
            "U, ω=e+f",
            IntersectionLattice::hyperbolic_plane(),
            NsClass::from_i64(&[1, 1]),
        ),
    ];
    for (label, l, omega) in witnesses {
        let k = ComplexifiedClass::new(&l, RatClass::zero(l.rank()), omega.to_rational()).unwrap();
        let hits = l.spherical_scan(&k, bound).unwrap();
        let o = MukaiVector::structure_sheaf(l.rank());
        let found = hits.iter().any(|h| h.v == o && h.z.re.is_zero() && h.z.im.is_zero());
        t.check(found && *k.omega_square() == q(2, 1), || {
            format!("{label}: (1,0,1) with Z = 0 not found")
        });
    }
    t.finish()
}

/// Class counts against a divisor scan and 2^{k−1}, for 1 ≤ n ≤ max_n.
pub fn partner_counts(max_n: u64) -> CheckResult {
    let mut t = Tally::new("partner-count");
    for n in 1..=max_n {
        let classes = enumerate_candidates(Rank1Surface::new(n).unwrap());
        let brute = oracle::coprime_split_classes(n);
        let k = oracle::omega(n);
        let formula = if n == 1 { 1 } else { 1u64 << (k - 1) };
        let ok = classes.len() as u64 == brute
            && partner_class_count(n) == brute
            && brute == formula
            && classes.iter().all(|c| c.certified);
        t.check(ok, || {
            format!(
                "n = {n}: enumerated {}, counted {}, brute force {brute}, 2^(k−1) = {formula}",
                classes.len(),
                partner_class_count(n)
            )
        });
    }
    t.finish()
}

/// ⟨φ, φ⟩ = 0 and ⟨φ, φ̄⟩ = 2ω² for φ = exp(B+iω); λ·φ normalizes back to
/// (λ, B, ω).
pub fn exponential_identities(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("exp-identities");
    for _ in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let k = random::kahler(g, &l);
        let ids = l.exp_isotropy_identities(&k).unwrap();
        let lambda = q(g.gen_range(1..=50), g.gen_range(1..=9));
        let phi = l.exp_class(&lambda, k.b(), k.omega()).unwrap();
        let back = l.normalize_exponential(&phi);
        let ok = ids.pairing.0.is_zero()
            && ids.pairing.1.is_zero()
            && ids.hermitian == k.omega_square() * q(2, 1)
            && back
                .as_ref()
                .is_ok_and(|f| f.lambda == lambda && f.b == *k.b() && f.omega == *k.omega());
        t.check(ok, || {
            format!("B = {:?}, ω = {:?}, λ = {lambda}: {back:?}", k.b().0, k.omega().0)
        });
    }
    t.finish()
}

fn memberships(l: &IntersectionLattice, profiles: &[FormalSheaf], omega: &RatClass, beta: &Beta) -> Vec<Membership> {
    profiles
        .iter()
        .map(|f| l.torsion_pair_membership(f, omega, beta).unwrap())
        .collect()
}

/// decompose conserves (rank, c₁) and lands in T × F; μ = β lies in F and
/// the point class in T; ω ↦ tω with B fixed (so β ↦ tβ) keeps every
/// membership.
pub fn torsion_pair(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("torsion-pair");
    for _ in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let n = l.rank();
        let k = random::kahler(g, &l);
        let omega = k.omega();
        let beta = Beta::Rational(k.beta().clone());
        let f = random::formal_sheaf(g, &l, omega, 4);
        let (tp, fp) = l.decompose(&f, omega, &beta).unwrap();
        let conserved = tp.rank() + fp.rank() == f.rank()
            && tp.c1(n).add(&fp.c1(n)) == f.c1(n)
            && tp.torsion_length() + fp.torsion_length() == f.torsion_length()
            && l.in_torsion_class(&tp, omega, &beta).unwrap()
            && l.in_torsion_free_class(&fp, omega, &beta).unwrap();
        t.check(conserved, || format!("decompose({f:?}) = ({tp:?}, {fp:?})"));

        // boundary: a single factor of slope exactly β is in F, not T
        let factor = Factor::new(g.gen_range(1..=3), random::int_class(g, n, 4));
        let mu = l.slope(&factor, omega).unwrap();
        let single = FormalSheaf::from_factors(vec![factor]);
        let at = Beta::Rational(mu.clone());
        let boundary = l.torsion_pair_membership(&single, omega, &at).unwrap() == Membership::InF
            && l.torsion_pair_membership(&FormalSheaf::torsion(Torsion::points(n, 1)), omega, &beta)
                .unwrap()
                == Membership::InT;
        t.check(boundary, || format!("boundary at μ = β = {mu}"));

        let s = q(g.gen_range(1..=12), g.gen_range(1..=12));
        let k2 = ComplexifiedClass::new(&l, k.b().clone(), omega.scale(&s)).unwrap();
        let profiles = [f.clone(), tp, fp, single];
        let before = memberships(&l, &profiles, omega, &beta);
        let after = memberships(&l, &profiles, k2.omega(), &Beta::Rational(k2.beta().clone()));
        t.check(before == after, || format!("ω ↦ {s}·ω changed {before:?} to {after:?}"));
    }
    t.finish()
}

/// ω ↦ tω together with B ↦ B/t, which fixes β = (B.ω) but rescales every
/// slope by t. Memberships are compared before and after.
pub fn joint_rescaling(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("joint-rescaling");
    for _ in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let k = random::kahler(g, &l);
        let s = q(g.gen_range(1..=12), g.gen_range(1..=12));
        let profiles: Vec<FormalSheaf> = (0..4).map(|_| random::formal_sheaf(g, &l, k.omega(), 3)).collect();
        let k2 = ComplexifiedClass::new(&l, k.b().scale(&s.recip()), k.omega().scale(&s)).unwrap();
        let before = memberships(&l, &profiles, k.omega(), &Beta::Rational(k.beta().clone()));
        let after = memberships(&l, &profiles, k2.omega(), &Beta::Rational(k2.beta().clone()));
        t.check(before == after, || {
            let i = (0..profiles.len()).find(|&i| before[i] != after[i]).unwrap_or(0);
            let omega: Vec<String> = k.omega().0.iter().map(|x| x.to_string()).collect();
            format!(
                "t = {s}, β = {} fixed, ω = [{}]: {:?} moved from {:?} to {:?}",
                k.beta(),
                omega.join(", "),
                profiles[i],
                before[i],
                after[i]
            )
        });
    }
    t.finish()
}

/// bridgerem_sprime against a linear scan of χ(F, E).
pub fn sprime(g: &mut Gen, count: usize) -> CheckResult {
    let mut t = Tally::new("sprime");
    for _ in 0..count {
        let l = random::even_lattice(g, 1..=4);
        let n = l.rank();
        let mut vf = random::mukai_vector(g, n, 8);
        vf.r = vf.r.abs() + Int::one();
        let lp = random::int_class(g, n, 6);
        let rp = Int::from(g.gen_range(0..=9));
        let got = l.bridgerem_sprime(&vf, &lp, &rp).unwrap();
        let l_dot_sum = l.intersect(&vf.l, &vf.l.add(&lp)).unwrap();
        let want = oracle::sprime_scan(&vf.r, &vf.s, &rp, &l_dot_sum, &Int::zero());
        t.check(got == want, || {
            format!("v(F) = {vf}, ℓ′ = {:?}, r′ = {rp}: {got} ≠ {want}", lp.0)
        });
    }
    t.finish()
}
