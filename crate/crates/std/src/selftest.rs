//! The `selftest` subcommand: worked examples plus a quick randomized pass
//! over every invariant.

use mukai_core::construct::{solve_extension_lemma, ExtensionProblem};
use mukai_core::isometry::ReductionStep;
use mukai_core::partners::{enumerate_candidates, Rank1Surface};
use mukai_core::{IntersectionLattice, MukaiVector, NsClass, Rat};

use crate::invariants::{self, CheckResult};
use crate::random;

pub const DEFAULT_SEED: u64 = 20_240_601;

fn example(name: &'static str, ok: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        cases: 1,
        passed: ok,
        detail,
    }
}

fn worked_examples() -> Vec<CheckResult> {
    let u = IntersectionLattice::hyperbolic_plane();
    let v = MukaiVector::new(4, NsClass::from_i64(&[2, 2]), 1);
    let red = u.reduce_to_coprime(&v);
    let want = MukaiVector::new(3, NsClass::from_i64(&[-6, -2]), 4);
    let reduce_ok = red.as_ref().is_ok_and(|r| {
        r.vector == want && r.steps.first() == Some(&ReductionStep::LineTwist(NsClass::from_i64(&[1, 0])))
    });

    let p = ExtensionProblem::new(Rat::from_integer(1.into()), 2, Rat::new(7.into(), 10.into()));
    let ext = solve_extension_lemma(&p);
    let ext_ok = ext
        .as_ref()
        .is_ok_and(|s| s.degree == Rat::from_integer(1.into()) && s.r_prime == 1.into());

    let six = enumerate_candidates(Rank1Surface::new(6).expect("n ≥ 1"));
    let six_ok = six.len() == 2 && six.iter().all(|c| c.certified);

    vec![
        example(
            "example-reduce",
            reduce_ok,
            match &red {
                Ok(r) => r.vector.to_string(),
                Err(e) => e.to_string(),
            },
        ),
        example(
            "example-extension-lemma",
            ext_ok,
            match &ext {
                Ok(s) => format!("(ℓ′, r′) = ({}, {})", s.degree, s.r_prime),
                Err(e) => e.to_string(),
            },
        ),
        example("example-partners-6", six_ok, format!("{} classes", six.len())),
    ]
}

/// Runs everything with the given seed; deterministic in the seed.
pub fn run(seed: u64) -> Vec<CheckResult> {
    let mut g = random::rng(seed);
    let mut out = worked_examples();
    out.push(invariants::pairing_convention(&mut g, 200));
    out.push(invariants::im_z_identity(&mut g, 200));
    out.push(invariants::isometry_suite(&mut g, 200));
    out.push(invariants::reduction(&mut g, 20));
    out.push(invariants::extension_lemma(&mut g, 200));
    out.push(invariants::spherical_scan(5));
    out.push(invariants::partner_counts(500));
    out.push(invariants::exponential_identities(&mut g, 100));
    out.push(invariants::torsion_pair(&mut g, 100));
    out.push(invariants::sprime(&mut g, 100));
    out
}
