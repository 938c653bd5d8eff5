//! Argument parsing and subcommand dispatch for the `mukai` tool.

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mukai_core::construct::{
    e_threshold, e_threshold_with_floor, extension_inequality_holds, solve_extension_lemma,
    solve_extension_lemma_normalized, ExtensionProblem,
};
use mukai_core::isometry::{mukai_gram, MukaiIsometry, ReductionNote, ReductionStep, DEFAULT_TWIST_SEARCH_BOUND};
use mukai_core::mukai::rank_content_gcd;
use mukai_core::partners::{distinct_prime_factors, enumerate_candidates, partner_class_count, Rank1Surface};
use mukai_core::stability::{
    real_class, Beta, ComplexifiedClass, HeartViolation, Membership, MinimalInput, MinimalShape, Phase, QuadricClass,
};
use mukai_core::{Int, IntersectionLattice, MukaiVector, Rat, RatClass};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::codec::{self, int_json, mukai_json, ns_json, rat_class_json, rat_json};
use crate::error::{CliError, ErrorKind};
use crate::selftest;

pub const DEFAULT_SCAN_BOUND: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "mukai",
    version,
    about = "Exact Mukai-lattice and tilt-stability computations on K3 surfaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Lattice JSON file, or inline JSON starting with '{'. Falls back to $MUKAI_LATTICE.
    #[arg(long, global = true, value_name = "PATH")]
    pub lattice: Option<String>,
    /// B-field as a JSON array of rationals; defaults to 0.
    #[arg(long = "B", global = true, value_name = "JSON", allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Kähler class as a JSON array of rationals; defaults to the polarization.
    #[arg(long, global = true, value_name = "JSON", allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Rational β = p/q; overrides (B.ω) for torsion-pair questions.
    #[arg(long, global = true, value_name = "P/Q", allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Irrational β given by a bracket lo < β < hi free of slopes.
    #[arg(
        long = "beta-irrational",
        global = true,
        value_name = "LO,HI",
        allow_hyphen_values = true
    )]
    pub beta_irrational: Option<String>,
    /// Search bound (twist-class search for `reduce`, box size for `scan-spherical`).
    #[arg(long, global = true)]
    pub bound: Option<u32>,
    /// Worker threads for `scan-spherical`; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Add display-only float fields next to exact rationals.
    #[arg(long, global = true)]
    pub approx: bool,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

/// Positional JSON arguments accept a literal, `@path` or `-` for stdin.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mukai pairing ⟨v, w⟩.
    Pair { v: String, w: String },
    /// Euler pairing χ(v, w) = −⟨v, w⟩.
    Euler { v: String, w: String },
    /// Fine-moduli conditions gcd(r, a(ℓ.H), s) = 1 and a²ℓ² = 2rs.
    Crucform { v: String },
    /// ⟨v, v⟩ with the spherical and isotropic tests.
    Classify { v: String },
    /// Mukai vector of {"rank", "c1", "c2"}.
    FromChern { c: String },
    /// Chern data of a Mukai vector.
    ToChern { v: String },
    /// Intersection x.y of (rational) classes; x² when y is omitted.
    Intersect { x: String, y: Option<String> },
    /// Whether a rational class lies in the positive cone of the polarization.
    Cone { omega: Option<String> },
    /// Content and primitive part of an integral class.
    Primitive { x: String },
    /// Validated lattice with determinant and Mukai Gram matrix.
    Lattice,
    /// The spherical twist T_O, optionally applied to a vector.
    TwistSpherical { v: Option<String> },
    /// The twist by a line bundle of class c, optionally applied to a vector.
    TwistLine {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        v: Option<String>,
    },
    /// Validate an integer matrix as a Mukai isometry; invert and apply it.
    Isometry { matrix: String, v: Option<String> },
    /// Composite m ∘ n of two isometries.
    Compose { m: String, n: String },
    /// Reduce a fine-moduli vector to one with coprime rank and divisor.
    Reduce { v: String },
    /// λ·exp(B + iω) and its isotropy identities.
    Exp {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
    },
    /// Write an isotropic complex class as λ·exp(B + iω).
    NormalizeExp {
        w: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        re: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        im: Option<String>,
    },
    /// Membership of a complex class in the period quadrics.
    Quadric { x: String },
    /// Central charge Z(v) = ⟨v, exp(B + iω)⟩.
    Charge { v: String },
    /// Phase classification of Z(v).
    Phase { v: String },
    /// HN slopes and torsion-pair membership of a sheaf profile.
    TorsionPair { sheaf: String },
    /// Split a sheaf profile into its T(β) and F(β) parts.
    Decompose { sheaf: String },
    /// Membership of a two-term complex in the tilted heart.
    Heart { complex: String },
    /// Numerical shape test for minimal objects of the heart.
    Minimal { input: String },
    /// Spherical classes with Z ∈ ℝ≤0 in a box.
    ScanSpherical,
    /// Degree and rank (ℓ′, r′) of the quotient for the extension lemma.
    ExtensionLemma {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        r: String,
        /// Degree of the auxiliary twist used when ℓ ≤ 0; defaults to H².
        #[arg(long = "twist-degree", allow_hyphen_values = true)]
        twist_degree: Option<String>,
        /// Only accept r′ ≥ r.
        #[arg(long = "r-prime-at-least-rank")]
        r_prime_at_least_rank: bool,
    },
    /// e-stability threshold for the quotient G.
    EThreshold {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        r: String,
        #[arg(long = "l-prime", allow_hyphen_values = true)]
        l_prime: String,
        #[arg(long = "r-prime")]
        r_prime: String,
        /// Lower slope bound of the bounded family.
        #[arg(long, allow_hyphen_values = true)]
        mu0: Option<String>,
    },
    /// Smallest s′ with χ(F, E) > 0 for v(E) = (r+r′, ℓ+ℓ′, s′).
    Sprime {
        v: String,
        #[arg(long = "l-prime", allow_hyphen_values = true)]
        l_prime: String,
        #[arg(long = "r-prime")]
        r_prime: String,
    },
    /// Candidate moduli spaces M(r, ℓ, s) with rs = n at Picard rank one.
    Partners {
        #[arg(long)]
        n: String,
    },
    /// Run the invariant suite on seeded random instances.
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
    },
}

/// Library operations and the subcommand exposing each.
pub const OPERATIONS: &[(&str, &str)] = &[
    ("mukai_pair", "pair"),
    ("euler_chi", "euler"),
    ("crucform_check", "crucform"),
    ("rank_content_gcd", "crucform"),
    ("mukai_square", "classify"),
    ("is_spherical", "classify"),
    ("is_isotropic", "classify"),
    ("from_chern", "from-chern"),
    ("to_chern", "to-chern"),
    ("intersect", "intersect"),
    ("intersect_rat", "intersect"),
    ("intersect_mixed", "intersect"),
    ("square", "intersect"),
    ("positive_cone_check", "cone"),
    ("content", "primitive"),
    ("content_split", "primitive"),
    ("is_primitive", "primitive"),
    ("determinant", "lattice"),
    ("mukai_gram", "lattice"),
    ("spherical_twist_o", "twist-spherical"),
    ("line_twist", "twist-line"),
    ("apply", "isometry"),
    ("invert", "isometry"),
    ("fixes_point_class", "isometry"),
    ("compose", "compose"),
    ("reduce_to_coprime", "reduce"),
    ("reduce_to_coprime_within", "reduce"),
    ("isometry", "reduce"),
    ("exp_class", "exp"),
    ("exp_isotropy_identities", "exp"),
    ("normalize_exponential", "normalize-exp"),
    ("mukai_pair_rat", "quadric"),
    ("mukai_pair_complex", "quadric"),
    ("hermitian_norm", "quadric"),
    ("quadric_membership", "quadric"),
    ("real_class", "quadric"),
    ("central_charge", "charge"),
    ("im_z_formula", "charge"),
    ("stability_valid", "charge"),
    ("phase", "phase"),
    ("classify_phase", "phase"),
    ("slope", "torsion-pair"),
    ("hn_slopes", "torsion-pair"),
    ("hn_mu_max", "torsion-pair"),
    ("hn_mu_min", "torsion-pair"),
    ("torsion_pair_membership", "torsion-pair"),
    ("in_torsion_class", "torsion-pair"),
    ("in_torsion_free_class", "torsion-pair"),
    ("decompose", "decompose"),
    ("heart_membership", "heart"),
    ("minimal_candidate", "minimal"),
    ("spherical_scan", "scan-spherical"),
    ("spherical_scan_ranks", "scan-spherical"),
    ("solve_extension_lemma", "extension-lemma"),
    ("solve_extension_lemma_normalized", "extension-lemma"),
    ("extension_inequality_holds", "extension-lemma"),
    ("e_threshold", "e-threshold"),
    ("e_threshold_with_floor", "e-threshold"),
    ("bridgerem_sprime", "sprime"),
    ("enumerate_candidates", "partners"),
    ("partner_class_count", "partners"),
    ("distinct_prime_factors", "partners"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Options shared by every subcommand, validated before dispatch.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub lattice_path: Option<String>,
    pub lattice: Option<IntersectionLattice>,
    pub b: Option<RatClass>,
    pub omega: Option<RatClass>,
    pub beta: Option<Beta>,
    pub output: OutputFormat,
    pub scan_bound: u32,
    pub bound: Option<u32>,
    pub threads: usize,
    pub approx: bool,
}

fn read_source(arg: &str, what: &str) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::validation(format!("{what}: reading stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{what}: {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn json_arg(arg: &str, what: &str) -> Result<Value, CliError> {
    codec::parse(&read_source(arg, what)?, what)
}

impl SessionConfig {
    pub fn from_args(g: &GlobalArgs, lattice_env: Option<String>) -> Result<Self, CliError> {
        let lattice_path = g.lattice.clone().or(lattice_env);
        let lattice = match &lattice_path {
            Some(p) => {
                let text = if p.trim_start().starts_with('{') {
                    p.clone()
                } else {
                    std::fs::read_to_string(p).map_err(|e| CliError::validation(format!("lattice file {p}: {e}")))?
                };
                Some(codec::lattice(&codec::parse(&text, "lattice")?)?)
            }
            None => None,
        };
        let class = |s: &Option<String>, what: &str| -> Result<Option<RatClass>, CliError> {
            s.as_deref()
                .map(|s| codec::rat_class(&codec::parse(s, what)?, what))
                .transpose()
        };
        let b = class(&g.b, "--B")?;
        let omega = class(&g.omega, "--omega")?;
        let beta = match (&g.beta_irrational, &g.beta) {
            (Some(br), _) => {
                let (lo, hi) = br
                    .split_once(',')
                    .ok_or_else(|| CliError::validation("--beta-irrational expects LO,HI"))?;
                let lo = codec::rat_str(lo, "--beta-irrational")?;
                let hi = codec::rat_str(hi, "--beta-irrational")?;
                Some(Beta::irrational(lo, hi)?)
            }
            (None, Some(b)) => Some(Beta::Rational(codec::rat_str(b, "--beta")?)),
            (None, None) => None,
        };
        if g.threads == 0 {
            return Err(CliError::validation("--threads must be at least 1"));
        }
        if g.bound == Some(0) {
            return Err(CliError::validation("--bound must be positive"));
        }
        Ok(SessionConfig {
            lattice_path,
            lattice,
            b,
            omega,
            beta,
            output: g.output,
            scan_bound: g.bound.unwrap_or(DEFAULT_SCAN_BOUND),
            bound: g.bound,
            threads: g.threads,
            approx: g.approx,
        })
    }

    fn lattice(&self) -> Result<&IntersectionLattice, CliError> {
        self.lattice
            .as_ref()
            .ok_or_else(|| CliError::validation("no lattice given: pass --lattice <path> or set MUKAI_LATTICE"))
    }

    fn kahler(&self) -> Result<ComplexifiedClass, CliError> {
        let l = self.lattice()?;
        let b = self.b.clone().unwrap_or_else(|| RatClass::zero(l.rank()));
        let omega = self.omega.clone().unwrap_or_else(|| l.ample().to_rational());
        l.check_dim(omega.rank())?;
        Ok(ComplexifiedClass::new(l, b, omega)?)
    }

    fn beta_for(&self, k: &ComplexifiedClass) -> Beta {
        self.beta.clone().unwrap_or_else(|| Beta::Rational(k.beta().clone()))
    }

    fn rational_beta(&self) -> Result<Rat, CliError> {
        match &self.beta {
            Some(Beta::Rational(b)) => Ok(b.clone()),
            Some(Beta::Irrational { .. }) => Err(CliError::validation("this command needs a rational --beta")),
            None => Err(CliError::validation("--beta is required")),
        }
    }
}

fn vector(arg: &str, what: &str, l: &IntersectionLattice) -> Result<MukaiVector, CliError> {
    let v = codec::mukai_vector(&json_arg(arg, what)?, what)?;
    l.check_dim(v.l.rank())?;
    Ok(v)
}

fn int_arg(s: &str, what: &str) -> Result<Int, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::validation(format!("{what}: {s:?} is not an integer")))
}

fn beta_json(b: &Beta) -> Value {
    match b {
        Beta::Rational(q) => rat_json(q),
        Beta::Irrational { lo, hi } => json!({"irrational": {"lo": rat_json(lo), "hi": rat_json(hi)}}),
    }
}

fn membership_name(m: Membership) -> &'static str {
    match m {
        Membership::Zero => "zero",
        Membership::InT => "T",
        Membership::InF => "F",
        Membership::Neither => "neither",
    }
}

fn step_json(s: &ReductionStep) -> Value {
    match s {
        ReductionStep::LineTwist(c) => json!({"line_twist": ns_json(c)}),
        ReductionStep::SphericalTwist => json!("spherical_twist"),
        ReductionStep::Shift => json!("shift"),
    }
}

fn note_name(n: ReductionNote) -> &'static str {
    match n {
        ReductionNote::AlreadyCoprime => "already-coprime",
        ReductionNote::PicardRankOne => "picard-rank-one",
        ReductionNote::DegenerateZeroDivisor => "zero-divisor",
    }
}

/// Every rational in `items`, or `None` if some entry is not integral.
fn integral(x: &RatClass) -> Option<mukai_core::NsClass> {
    x.0.iter()
        .map(|q| q.is_integer().then(|| q.to_integer()))
        .collect::<Option<Vec<_>>>()
        .map(mukai_core::NsClass)
}

fn execute(cmd: &Command, cfg: &SessionConfig) -> Result<Value, CliError> {
    match cmd {
        Command::Pair { v, w } => {
            let l = cfg.lattice()?;
            let (v, w) = (vector(v, "v", l)?, vector(w, "w", l)?);
            Ok(json!({"value": int_json(&l.mukai_pair(&v, &w)?)}))
        }
        Command::Euler { v, w } => {
            let l = cfg.lattice()?;
            let (v, w) = (vector(v, "v", l)?, vector(w, "w", l)?);
            Ok(json!({"value": int_json(&l.euler_chi(&v, &w)?)}))
        }
        Command::Crucform { v } => {
            let l = cfg.lattice()?;
            let v = vector(v, "v", l)?;
            let rep = l.crucform_check(&v)?;
            Ok(json!({
                "holds": rep.holds(),
                "gcd_condition": rep.gcd_condition,
                "dimension_condition": rep.dimension_condition,
                "primitive_decomposition": rep.primitive_decomposition,
                "a": int_json(&rep.a),
                "l": ns_json(&rep.l),
                "l_dot_h": int_json(&rep.l_dot_h),
                "isotropic": l.is_isotropic(&v)?,
                "rank_content_gcd": int_json(&rank_content_gcd(&v)),
            }))
        }
        Command::Classify { v } => {
            let l = cfg.lattice()?;
            let v = vector(v, "v", l)?;
            Ok(json!({
                "square": int_json(&l.mukai_square(&v)?),
                "spherical": l.is_spherical(&v)?,
                "isotropic": l.is_isotropic(&v)?,
            }))
        }
        Command::FromChern { c } => {
            let l = cfg.lattice()?;
            let c = codec::chern(&json_arg(c, "chern")?, "chern")?;
            Ok(json!({"v": mukai_json(&l.from_chern(&c)?)}))
        }
        Command::ToChern { v } => {
            let l = cfg.lattice()?;
            let v = vector(v, "v", l)?;
            Ok(json!({"chern": codec::chern_json(&l.to_chern(&v)?)}))
        }
        Command::Intersect { x, y } => {
            let l = cfg.lattice()?;
            let x = codec::rat_class(&json_arg(x, "x")?, "x")?;
            let y = match y {
                Some(y) => Some(codec::rat_class(&json_arg(y, "y")?, "y")?),
                None => None,
            };
            let value = match (integral(&x), y.as_ref().map(|y| (integral(y), y))) {
                (Some(xi), None) => int_json(&l.square(&xi)?),
                (Some(xi), Some((Some(yi), _))) => int_json(&l.intersect(&xi, &yi)?),
                (Some(xi), Some((None, y))) => rat_json(&l.intersect_mixed(&xi, y)?),
                (None, Some((Some(yi), _))) => rat_json(&l.intersect_mixed(&yi, &x)?),
                (None, Some((None, y))) => rat_json(&l.intersect_rat(&x, y)?),
                (None, None) => rat_json(&l.intersect_rat(&x, &x)?),
            };
            Ok(json!({"value": value}))
        }
        Command::Cone { omega } => {
            let l = cfg.lattice()?;
            let w = match omega {
                Some(w) => codec::rat_class(&json_arg(w, "omega")?, "omega")?,
                None => cfg
                    .omega
                    .clone()
                    .ok_or_else(|| CliError::validation("give a class or --omega"))?,
            };
            Ok(json!({
                "in_positive_cone": l.positive_cone_check(&w)?,
                "square": rat_json(&l.intersect_rat(&w, &w)?),
                "dot_ample": rat_json(&l.intersect_mixed(l.ample(), &w)?),
            }))
        }
        Command::Primitive { x } => {
            let x = codec::ns_class(&json_arg(x, "x")?, "x")?;
            if let Some(l) = &cfg.lattice {
                l.check_dim(x.rank())?;
            }
            let split = match x.content_split() {
                Ok((a, p)) => json!({"a": int_json(&a), "primitive": ns_json(&p)}),
                Err(_) => Value::Null,
            };
            Ok(json!({
                "content": int_json(&x.content()),
                "is_primitive": x.is_primitive().unwrap_or(false),
                "split": split,
            }))
        }
        Command::Lattice => {
            let l = cfg.lattice()?;
            Ok(json!({
                "lattice": codec::lattice_json(l),
                "determinant": int_json(&mukai_core::lattice::determinant(l.gram())),
                "ample_square": int_json(&l.square(l.ample())?),
                "mukai_gram": codec::matrix_json(&mukai_gram(l)),
            }))
        }
        Command::TwistSpherical { v } => {
            let l = cfg.lattice()?;
            isometry_result(l, MukaiIsometry::spherical_twist_o(l), v.as_deref())
        }
        Command::TwistLine { c, v } => {
            let l = cfg.lattice()?;
            let c = codec::ns_class(&json_arg(c, "--c")?, "--c")?;
            isometry_result(l, MukaiIsometry::line_twist(l, &c)?, v.as_deref())
        }
        Command::Isometry { matrix, v } => {
            let l = cfg.lattice()?;
            let m = MukaiIsometry::new(l, codec::matrix(&json_arg(matrix, "matrix")?, "matrix")?)?;
            let mut out = isometry_result(l, m.clone(), v.as_deref())?;
            out["inverse"] = codec::isometry_json(&m.invert());
            Ok(out)
        }
        Command::Compose { m, n } => {
            let l = cfg.lattice()?;
            let m = MukaiIsometry::new(l, codec::matrix(&json_arg(m, "m")?, "m")?)?;
            let n = MukaiIsometry::new(l, codec::matrix(&json_arg(n, "n")?, "n")?)?;
            Ok(json!({"isometry": codec::isometry_json(&m.compose(&n)?)}))
        }
        Command::Reduce { v } => {
            let l = cfg.lattice()?;
            let v = vector(v, "v", l)?;
            let red = match cfg.bound {
                Some(b) => l.reduce_to_coprime_within(&v, b)?,
                None => l.reduce_to_coprime(&v)?,
            };
            let m = red.isometry(l)?;
            let crucform = l.crucform_check(&red.vector)?;
            Ok(json!({
                "input": mukai_json(&red.input),
                "vector": mukai_json(&red.vector),
                "twist_class": red.twist_class().map(ns_json),
                "steps": red.steps.iter().map(step_json).collect::<Vec<_>>(),
                "note": red.note.map(note_name),
                "bound": cfg.bound.unwrap_or(DEFAULT_TWIST_SEARCH_BOUND),
                "isometry": codec::isometry_json(&m),
                "checks": {
                    "maps_input": m.apply(&red.input)? == red.vector,
                    "isotropic": l.is_isotropic(&red.vector)?,
                    "crucform": crucform.holds(),
                    "rank_content_gcd": int_json(&rank_content_gcd(&red.vector)),
                },
            }))
        }
        Command::Exp { lambda } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let lambda = codec::rat_str(lambda, "--lambda")?;
            let ids = l.exp_isotropy_identities(&k)?;
            Ok(json!({
                "B": rat_class_json(k.b()),
                "omega": rat_class_json(k.omega()),
                "lambda": rat_json(&lambda),
                "class": codec::complex_json(&l.exp_class(&lambda, k.b(), k.omega())?),
                "identities": {
                    "pairing": {"re": rat_json(&ids.pairing.0), "im": rat_json(&ids.pairing.1)},
                    "hermitian": rat_json(&ids.hermitian),
                    "two_omega_square": rat_json(&(k.omega_square() * Rat::from_integer(2.into()))),
                },
            }))
        }
        Command::NormalizeExp { w, re, im } => {
            let l = cfg.lattice()?;
            let w = match (w, re) {
                (Some(w), None) => codec::complex_mukai(&json_arg(w, "w")?, "w")?,
                (None, Some(re)) => {
                    let re = codec::rat_mukai(&json_arg(re, "--re")?, "--re")?;
                    let im = match im {
                        Some(im) => codec::rat_mukai(&json_arg(im, "--im")?, "--im")?,
                        None => mukai_core::RatMukai::zero(re.l.rank()),
                    };
                    mukai_core::ComplexMukai { re, im }
                }
                _ => return Err(CliError::validation("give either a class {\"re\",\"im\"} or --re/--im")),
            };
            let form = l.normalize_exponential(&w)?;
            Ok(json!({
                "lambda": rat_json(&form.lambda),
                "B": rat_class_json(&form.b),
                "omega": rat_class_json(&form.omega),
                "round_trip": form.to_complex(l)? == w,
            }))
        }
        Command::Quadric { x } => {
            let l = cfg.lattice()?;
            let parsed = json_arg(x, "x")?;
            // a bare {"r","l","s"} is read as a real class
            let x = if parsed.get("re").is_some() {
                codec::complex_mukai(&parsed, "x")?
            } else {
                real_class(&codec::rat_mukai(&parsed, "x")?)
            };
            l.check_dim(x.re.l.rank())?;
            l.check_dim(x.im.l.rank())?;
            let rep = l.quadric_membership(&x)?;
            let class = match rep.class() {
                QuadricClass::InQPrime => "Q'",
                QuadricClass::InQTilde => "Q~",
                QuadricClass::Neither => "neither",
            };
            Ok(json!({
                "pairing": {"re": rat_json(&rep.pairing.0), "im": rat_json(&rep.pairing.1)},
                "re_im_pairing": rat_json(&l.mukai_pair_rat(&x.re, &x.im)?),
                "hermitian": rat_json(&rep.hermitian),
                "in_q_tilde": rep.in_q_tilde,
                "in_q_prime": rep.in_q_prime,
                "in_q": rep.in_q,
                "class": class,
            }))
        }
        Command::Charge { v } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let v = vector(v, "v", l)?;
            Ok(json!({
                "z": codec::charge_json(&l.central_charge(&k, &v)?),
                "im_formula": rat_json(&l.im_z_formula(&k, &v)?),
                "beta": rat_json(k.beta()),
                "omega_square": rat_json(k.omega_square()),
                "stability_valid": k.stability_valid(),
            }))
        }
        Command::Phase { v } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let v = vector(v, "v", l)?;
            let (name, z, approx) = match l.phase(&k, &v)? {
                Phase::Interior { re, im, approx } => (
                    "interior",
                    json!({"re": rat_json(&re), "im": rat_json(&im)}),
                    Some(approx),
                ),
                Phase::Boundary { re } => ("boundary", json!({"re": rat_json(&re), "im": "0/1"}), Some(1.0)),
                Phase::Invalid { re, im } => ("invalid", json!({"re": rat_json(&re), "im": rat_json(&im)}), None),
            };
            let mut out = json!({"classification": name, "z": z});
            if cfg.approx {
                out["phase_approx"] = approx.map_or(Value::Null, |a| json!(a));
            }
            Ok(out)
        }
        Command::TorsionPair { sheaf } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let beta = cfg.beta_for(&k);
            let f = codec::formal_sheaf(&json_arg(sheaf, "sheaf")?, "sheaf")?;
            let slopes = l.hn_slopes(&f, k.omega())?;
            let factor_slopes = f
                .factors
                .iter()
                .map(|x| l.slope(x, k.omega()).map(|q| rat_json(&q)))
                .collect::<Result<Vec<_>, _>>()?;
            debug_assert_eq!(factor_slopes, slopes.iter().map(rat_json).collect::<Vec<_>>());
            let opt = |r: Result<Rat, _>| r.map(|q| rat_json(&q)).unwrap_or(Value::Null);
            Ok(json!({
                "beta": beta_json(&beta),
                "slopes": factor_slopes,
                "mu_max": opt(l.hn_mu_max(&f, k.omega())),
                "mu_min": opt(l.hn_mu_min(&f, k.omega())),
                "membership": membership_name(l.torsion_pair_membership(&f, k.omega(), &beta)?),
                "in_T": l.in_torsion_class(&f, k.omega(), &beta)?,
                "in_F": l.in_torsion_free_class(&f, k.omega(), &beta)?,
            }))
        }
        Command::Decompose { sheaf } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let beta = cfg.beta_for(&k);
            let f = codec::formal_sheaf(&json_arg(sheaf, "sheaf")?, "sheaf")?;
            let (t, fr) = l.decompose(&f, k.omega(), &beta)?;
            let n = l.rank();
            Ok(json!({
                "beta": beta_json(&beta),
                "T": codec::sheaf_json(&t),
                "F": codec::sheaf_json(&fr),
                "conserved": t.rank() + fr.rank() == f.rank() && t.c1(n).add(&fr.c1(n)) == f.c1(n),
            }))
        }
        Command::Heart { complex } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let beta = cfg.beta_for(&k);
            let c = codec::numerical_complex(&json_arg(complex, "complex")?, "complex")?;
            let rep = l.heart_membership(&c, k.omega(), &beta)?;
            let violations: Vec<Value> = rep
                .violations
                .iter()
                .map(|v| match v {
                    HeartViolation::TorsionInDegreeMinusOne => json!({"kind": "torsion-in-h-1"}),
                    HeartViolation::SlopeAboveBeta { mu_max } => {
                        json!({"kind": "h-1-slope-above-beta", "mu_max": rat_json(mu_max)})
                    }
                    HeartViolation::SlopeNotAboveBeta { mu_min } => {
                        json!({"kind": "h0-slope-not-above-beta", "mu_min": rat_json(mu_min)})
                    }
                })
                .collect();
            Ok(json!({
                "beta": beta_json(&beta),
                "member": rep.is_member(),
                "h_minus1_in_F": rep.h_minus1_in_f,
                "h0_in_T": rep.h0_in_t,
                "violations": violations,
            }))
        }
        Command::Minimal { input } => {
            let k = cfg.kahler()?;
            let l = cfg.lattice()?;
            let beta = cfg.beta_for(&k);
            let parsed = json_arg(input, "input")?;
            let shape = if parsed.get("r").is_some() {
                let v = codec::mukai_vector(&parsed, "input")?;
                l.minimal_candidate(MinimalInput::Vector(&v), k.omega(), &beta)?
            } else {
                let c = codec::numerical_complex(&parsed, "input")?;
                l.minimal_candidate(MinimalInput::Complex(&c), k.omega(), &beta)?
            };
            let name = match shape {
                MinimalShape::PointClass => "point-class",
                MinimalShape::ShiftedStableSlopeBeta => "shifted-stable-slope-beta",
                MinimalShape::NotMinimalShape => "not-minimal-shape",
            };
            Ok(json!({"beta": beta_json(&beta), "shape": name}))
        }
        Command::ScanSpherical => scan_spherical(cfg),
        Command::ExtensionLemma {
            l,
            r,
            twist_degree,
            r_prime_at_least_rank,
        } => {
            let degree = codec::rat_str(l, "--l")?;
            let rank = int_arg(r, "--r")?;
            let beta = cfg.rational_beta()?;
            let mut p = ExtensionProblem::new(degree.clone(), rank.clone(), beta.clone());
            if *r_prime_at_least_rank {
                p = p.with_r_prime_at_least_rank();
            }
            let sol = if degree.is_positive() {
                solve_extension_lemma(&p)?
            } else {
                let d = match (twist_degree, &cfg.lattice) {
                    (Some(d), _) => codec::rat_str(d, "--twist-degree")?,
                    (None, Some(lat)) => Rat::from_integer(lat.square(lat.ample())?),
                    (None, None) => {
                        return Err(CliError::hypothesis(format!(
                            "deg L = {} is not positive; pass --twist-degree or --lattice to twist-normalize",
                            codec::rat_string(&degree)
                        )))
                    }
                };
                solve_extension_lemma_normalized(&p, &d)?
            };
            Ok(json!({
                "input": {"l": rat_json(&degree), "r": int_json(&rank), "beta": rat_json(&beta)},
                "l'": rat_json(&sol.degree),
                "r'": int_json(&sol.r_prime),
                "multiple": int_json(&sol.multiple),
                "collinear": sol.collinear,
                "twists": int_json(&sol.twists),
                "e_min": sol.e_min.as_ref().map_or(Value::Null, rat_json),
                "checks": {"inequality": extension_inequality_holds(&degree, &rank, &sol.degree, &sol.r_prime, &beta)},
            }))
        }
        Command::EThreshold {
            l,
            r,
            l_prime,
            r_prime,
            mu0,
        } => {
            let degree = codec::rat_str(l, "--l")?;
            let rank = int_arg(r, "--r")?;
            let dp = codec::rat_str(l_prime, "--l-prime")?;
            let rp = int_arg(r_prime, "--r-prime")?;
            let e = match mu0 {
                Some(m) => e_threshold_with_floor(&degree, &rank, &dp, &rp, &codec::rat_str(m, "--mu0")?)?,
                None => e_threshold(&degree, &rank, &dp, &rp)?,
            };
            Ok(json!({"e": rat_json(&e)}))
        }
        Command::Sprime { v, l_prime, r_prime } => {
            let l = cfg.lattice()?;
            let vf = vector(v, "v", l)?;
            let lp = codec::ns_class(&json_arg(l_prime, "--l-prime")?, "--l-prime")?;
            let rp = int_arg(r_prime, "--r-prime")?;
            let sp = l.bridgerem_sprime(&vf, &lp, &rp)?;
            let e = MukaiVector {
                r: &vf.r + &rp,
                l: vf.l.add(&lp),
                s: sp.clone(),
            };
            Ok(json!({
                "s'": int_json(&sp),
                "v_E": mukai_json(&e),
                "chi": int_json(&l.euler_chi(&vf, &e)?),
            }))
        }
        Command::Partners { n } => {
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| CliError::validation(format!("--n: {n:?} is not a positive integer")))?;
            let surface = Rank1Surface::new(n).ok_or_else(|| CliError::validation("--n must be at least 1"))?;
            let classes: Vec<Value> = enumerate_candidates(surface)
                .iter()
                .map(|c| {
                    json!({
                        "members": c.members.iter().map(|m| json!({
                            "r": m.r, "s": m.s, "v": mukai_json(&m.mukai_vector()),
                        })).collect::<Vec<_>>(),
                        "certified": c.certified,
                    })
                })
                .collect();
            Ok(json!({
                "n": n,
                "lattice": codec::lattice_json(&surface.lattice()),
                "primes": distinct_prime_factors(n),
                "class_count": classes.len(),
                "formula_count": partner_class_count(n),
                "classes": classes,
            }))
        }
        Command::Selftest { seed } => {
            let report = selftest::run(*seed);
            let passed = report.iter().all(|c| c.passed);
            let out = json!({
                "seed": seed,
                "passed": passed,
                "checks": report.iter().map(|c| json!({
                    "name": c.name, "cases": c.cases, "passed": c.passed, "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            if passed {
                Ok(out)
            } else {
                Err(CliError::new(ErrorKind::SelftestFailed, out.to_string()))
            }
        }
    }
}

fn isometry_result(l: &IntersectionLattice, m: MukaiIsometry, v: Option<&str>) -> Result<Value, CliError> {
    let mut out = json!({"isometry": codec::isometry_json(&m)});
    if let Some(v) = v {
        let v = vector(v, "v", l)?;
        out["image"] = mukai_json(&m.apply(&v)?);
    }
    Ok(out)
}

fn scan_spherical(cfg: &SessionConfig) -> Result<Value, CliError> {
    let k = cfg.kahler()?;
    let l = cfg.lattice()?;
    let bound = cfg.scan_bound;
    let workers = cfg.threads.min(bound as usize + 1);
    // split 0..=bound into contiguous rank ranges; concatenation keeps the
    // lexicographic order of the serial scan
    let per = (bound + 1).div_ceil(workers as u32);
    let ranges: Vec<(u32, u32)> = (0..workers as u32)
        .map(|i| (i * per, ((i + 1) * per).min(bound + 1)))
        .filter(|(lo, hi)| lo < hi)
        .map(|(lo, hi)| (lo, hi - 1))
        .collect();
    let parts = std::thread::scope(|s| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(lo, hi)| {
                let k = &k;
                s.spawn(move || l.spherical_scan_ranks(k, bound, lo, hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let hits: Vec<Value> = parts
        .into_iter()
        .flatten()
        .map(|h| json!({"v": mukai_json(&h.v), "z": codec::charge_json(&h.z)}))
        .collect();
    Ok(json!({
        "B": rat_class_json(k.b()),
        "omega": rat_class_json(k.omega()),
        "omega_square": rat_json(k.omega_square()),
        "stability_valid": k.stability_valid(),
        "bound": bound,
        "count": hits.len(),
        "violations": hits,
    }))
}

fn render(v: Value, cfg: &SessionConfig) -> String {
    let v = if cfg.approx { codec::with_approx(v) } else { v };
    match cfg.output {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Table => codec::to_table(&v),
    }
}

fn failure(e: CliError) -> Outcome {
    let mut stderr = e.to_json_line();
    stderr.push('\n');
    Outcome {
        code: e.kind.exit_code(),
        stdout: String::new(),
        stderr,
    }
}

/// Parses `argv` (including the program name) and runs one command.
/// `lattice_env` is the value of `MUKAI_LATTICE`, if set.
pub fn run<I, T>(argv: I, lattice_env: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::error::ErrorKind as K;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.to_string();
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                kind => {
                    let first = text
                        .lines()
                        .next()
                        .unwrap_or("")
                        .trim_start_matches("error: ")
                        .to_string();
                    let ek = match kind {
                        K::InvalidSubcommand | K::MissingSubcommand | K::DisplayHelpOnMissingArgumentOrSubcommand => {
                            ErrorKind::UnknownSubcommand
                        }
                        _ => ErrorKind::Validation,
                    };
                    failure(CliError::new(ek, first))
                }
            };
        }
    };
    let cfg = match SessionConfig::from_args(&cli.global, lattice_env) {
        Ok(c) => c,
        Err(e) => return failure(e),
    };
    match execute(&cli.command, &cfg) {
        Ok(v) => Outcome {
            code: 0,
            stdout: render(v, &cfg),
            stderr: String::new(),
        },
        Err(e) => failure(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    const U: &str = r#"{"rank": 2, "gram": [[0, 1], [1, 0]], "ample": [1, 2]}"#;
    const H2: &str = r#"{"rank": 1, "gram": [[2]], "ample": [1]}"#;

    fn mukai(args: &[&str]) -> Outcome {
        run(std::iter::once("mukai").chain(args.iter().copied()), None)
    }

    fn ok(args: &[&str]) -> Value {
        let o = mukai(args);
        assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
        serde_json::from_str(&o.stdout).unwrap()
    }

    fn q(s: &str) -> Value {
        json!(s)
    }

    #[test]
    fn pair_of_structure_sheaf() {
        let o = mukai(&[
            "--lattice",
            H2,
            "pair",
            r#"{"r":1,"l":[0],"s":1}"#,
            r#"{"r":1,"l":[0],"s":1}"#,
        ]);
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout, "{\n  \"value\": -2\n}\n");
        let e = ok(&[
            "--lattice",
            H2,
            "euler",
            r#"{"r":1,"l":[0],"s":1}"#,
            r#"{"r":1,"l":[0],"s":1}"#,
        ]);
        assert_eq!(e["value"], json!(2));
    }

    #[test]
    fn reduce_running_example() {
        let v = ok(&["--lattice", U, "reduce", r#"{"r":4,"l":[2,2],"s":1}"#]);
        assert_eq!(v["vector"], json!({"r": 3, "l": [-6, -2], "s": 4}));
        assert_eq!(v["twist_class"], json!([1, 0]));
        assert_eq!(v["steps"], json!([{"line_twist": [1, 0]}, "spherical_twist", "shift"]));
        assert_eq!(v["checks"]["maps_input"], json!(true));
        assert_eq!(v["checks"]["rank_content_gcd"], json!(1));
        assert_eq!(v["isometry"]["valid"], json!(true));
    }

    #[test]
    fn crucform_violation_is_a_hypothesis_error() {
        let o = mukai(&["--lattice", U, "reduce", r#"{"r":2,"l":[2,2],"s":2}"#]);
        assert_eq!(o.code, 3);
        let line: Value = serde_json::from_str(o.stderr.trim()).unwrap();
        assert_eq!(line["kind"], json!("hypothesis"));
        assert_eq!(o.stderr.lines().count(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(mukai(&["frobnicate"]).code, 64);
        assert_eq!(mukai(&[]).code, 64);
        assert_eq!(mukai(&["--lattice", "{\"rank\": 1,", "lattice"]).code, 65);
        assert_eq!(mukai(&["--lattice", H2, "pair", "{\"r\":1}", "[1,2"]).code, 65);
        let bad = r#"{"rank": 2, "gram": [[0, 1], [2, 0]], "ample": [1, 2]}"#;
        let o = mukai(&["--lattice", bad, "lattice"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("gram[0][1] = 1 but gram[1][0] = 2"));
        // rank mismatch between vector and lattice
        assert_eq!(
            mukai(&[
                "--lattice",
                U,
                "pair",
                r#"{"r":1,"l":[0],"s":1}"#,
                r#"{"r":1,"l":[0],"s":1}"#
            ])
            .code,
            2
        );
        // β ≤ μ
        let o = mukai(&["--beta", "1/3", "extension-lemma", "--l", "1", "--r", "2"]);
        assert_eq!(o.code, 3, "{}", o.stderr);
        assert_eq!(mukai(&["pair", "{}", "{}"]).code, 2);
        assert_eq!(mukai(&["--help"]).code, 0);
    }

    #[test]
    fn lattice_from_environment() {
        let o = run(["mukai", "classify", r#"{"r":1,"l":[0,0],"s":1}"#], Some(U.to_string()));
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["square"], json!(-2));
        assert_eq!(v["spherical"], json!(true));
        // the flag wins over the environment
        let o = run(
            ["mukai", "--lattice", H2, "classify", r#"{"r":1,"l":[0],"s":1}"#],
            Some(U.to_string()),
        );
        assert_eq!(o.code, 0);
    }

    #[test]
    fn extension_lemma_output() {
        let v = ok(&["--beta", "7/10", "extension-lemma", "--l", "1", "--r", "2"]);
        assert_eq!(v["l'"], q("1/1"));
        assert_eq!(v["r'"], json!(1));
        assert_eq!(v["e_min"], Value::Null);
        assert_eq!(v["checks"]["inequality"], json!(true));
        let v = ok(&[
            "--beta",
            "7/10",
            "extension-lemma",
            "--l",
            "1",
            "--r",
            "2",
            "--r-prime-at-least-rank",
        ]);
        assert_eq!(
            (v["l'"].clone(), v["r'"].clone(), v["e_min"].clone()),
            (q("3/1"), json!(4), q("1/4"))
        );
        let v = ok(&[
            "--beta",
            "1/2",
            "extension-lemma",
            "--l",
            "-1",
            "--r",
            "1",
            "--twist-degree",
            "1",
        ]);
        assert_eq!(v["checks"]["inequality"], json!(true));
        let e = ok(&[
            "e-threshold",
            "--l",
            "1",
            "--r",
            "2",
            "--l-prime",
            "5",
            "--r-prime",
            "7",
        ]);
        assert_eq!(e["e"], q("2/7"));
    }

    #[test]
    fn partners_six() {
        let v = ok(&["partners", "--n", "6"]);
        assert_eq!(v["class_count"], json!(2));
        assert_eq!(v["formula_count"], json!(2));
        assert_eq!(v["classes"][1]["members"][0]["v"], json!({"r": 2, "l": [1], "s": 3}));
        assert_eq!(mukai(&["partners", "--n", "0"]).code, 2);
    }

    #[test]
    fn stability_commands() {
        let v = ok(&["--lattice", H2, "charge", r#"{"r":1,"l":[0],"s":1}"#]);
        assert_eq!(v["z"], json!({"re": "0/1", "im": "0/1"}));
        assert_eq!(v["stability_valid"], json!(false));
        let v = ok(&["--lattice", H2, "--omega", "[2]", "phase", r#"{"r":0,"l":[0],"s":1}"#]);
        assert_eq!(v["classification"], json!("boundary"));
        let v = ok(&["--lattice", H2, "--approx", "phase", r#"{"r":0,"l":[1],"s":0}"#]);
        assert_eq!(v["classification"], json!("interior"));
        assert!(v["phase_approx"].as_f64().is_some());
        // μ = β lands in F
        let sheaf = r#"{"torsion": null, "factors": [{"rank": 1, "c1": [1]}]}"#;
        let v = ok(&["--lattice", H2, "--beta", "2", "torsion-pair", sheaf]);
        assert_eq!(v["membership"], json!("F"));
        assert_eq!(
            mukai(&["--lattice", H2, "--beta-irrational", "1,3", "torsion-pair", sheaf]).code,
            3
        );
        let v = ok(&["--lattice", H2, "--beta-irrational", "5/2,3", "torsion-pair", sheaf]);
        assert_eq!(v["membership"], json!("F"));
        let v = ok(&["--lattice", H2, "--beta", "1", "decompose", sheaf]);
        assert_eq!(v["conserved"], json!(true));
        assert_eq!(v["T"]["factors"].as_array().unwrap().len(), 1);
        let cx = format!(r#"{{"h_minus1": {sheaf}, "h0": {{"torsion": {{"degree": [0], "length": 1}}}}}}"#);
        let v = ok(&["--lattice", H2, "--beta", "2", "heart", &cx]);
        assert_eq!(v["member"], json!(true));
        let v = ok(&["--lattice", H2, "--beta", "2", "minimal", r#"{"r":-1,"l":[-1],"s":0}"#]);
        assert_eq!(v["shape"], json!("shifted-stable-slope-beta"));
        let v = ok(&["--lattice", H2, "--omega", "[1]", "scan-spherical", "--bound", "3"]);
        assert_eq!(v["violations"][0]["v"], json!({"r": 1, "l": [0], "s": 1}));
    }

    #[test]
    fn scan_is_independent_of_threads() {
        let base = mukai(&["--lattice", U, "--omega", "[1,1]", "--bound", "6", "scan-spherical"]);
        assert_eq!(base.code, 0);
        for t in ["2", "3", "7", "16"] {
            let o = mukai(&[
                "--lattice",
                U,
                "--omega",
                "[1,1]",
                "--bound",
                "6",
                "--threads",
                t,
                "scan-spherical",
            ]);
            assert_eq!(o.stdout, base.stdout, "threads = {t}");
        }
    }

    #[test]
    fn exponential_commands() {
        let v = ok(&[
            "--lattice",
            U,
            "--B",
            "[\"1/2\", 0]",
            "--omega",
            "[1, 2]",
            "exp",
            "--lambda",
            "3",
        ]);
        assert_eq!(v["identities"]["pairing"], json!({"re": "0/1", "im": "0/1"}));
        assert_eq!(v["identities"]["hermitian"], v["identities"]["two_omega_square"]);
        let class = v["class"].to_string();
        let n = ok(&["--lattice", U, "normalize-exp", &class]);
        assert_eq!(n["lambda"], q("3/1"));
        assert_eq!(n["B"], json!(["1/2", "0/1"]));
        assert_eq!(n["round_trip"], json!(true));
        let d22 = r#"{"rank": 2, "gram": [[2, 0], [0, 2]], "ample": [1, 0]}"#;
        let x = r#"{"re": {"r": 0, "l": [1, 0], "s": 0}, "im": {"r": 0, "l": [0, 1], "s": 0}}"#;
        let v = ok(&["--lattice", d22, "quadric", x]);
        assert_eq!(v["class"], json!("Q'"));
        assert_eq!(v["in_q"], json!(true));
    }

    #[test]
    fn isometry_commands() {
        let t = ok(&["--lattice", U, "twist-spherical", r#"{"r":3,"l":[5,-2],"s":7}"#]);
        assert_eq!(t["image"], json!({"r": -7, "l": [5, -2], "s": -3}));
        let m = t["isometry"]["matrix"].to_string();
        let v = ok(&["--lattice", U, "isometry", &m]);
        assert_eq!(v["inverse"]["matrix"], t["isometry"]["matrix"]);
        let c = ok(&["--lattice", U, "compose", &m, &m]);
        assert_eq!(
            c["isometry"]["matrix"],
            json!([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        );
        let o = mukai(&["--lattice", U, "isometry", "[[2,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]"]);
        assert_eq!(o.code, 2);
        let l = ok(&[
            "--lattice",
            U,
            "twist-line",
            "--c",
            "[1,0]",
            r#"{"r":4,"l":[2,2],"s":1}"#,
        ]);
        assert_eq!(l["image"], json!({"r": 4, "l": [6, 2], "s": 3}));
    }

    #[test]
    fn lattice_helpers() {
        let v = ok(&["--lattice", U, "intersect", "[1,0]", "[0,1]"]);
        assert_eq!(v["value"], json!(1));
        let v = ok(&["--lattice", U, "intersect", "[\"1/2\",0]", "[0,1]"]);
        assert_eq!(v["value"], q("1/2"));
        let v = ok(&["--lattice", U, "intersect", "[1,1]"]);
        assert_eq!(v["value"], json!(2));
        let v = ok(&["--lattice", U, "cone", "[\"1/3\", 1]"]);
        assert_eq!(v["in_positive_cone"], json!(true));
        let v = ok(&["primitive", "[4,-6]"]);
        assert_eq!(v["split"], json!({"a": 2, "primitive": [2, -3]}));
        let v = ok(&["--lattice", U, "lattice"]);
        assert_eq!(v["determinant"], json!(-1));
        let c = ok(&["--lattice", U, "to-chern", r#"{"r":2,"l":[1,1],"s":0}"#]);
        let back = ok(&["--lattice", U, "from-chern", &c["chern"].to_string()]);
        assert_eq!(back["v"], json!({"r": 2, "l": [1, 1], "s": 0}));
        let s = ok(&[
            "--lattice",
            H2,
            "sprime",
            r#"{"r":2,"l":[1],"s":0}"#,
            "--l-prime",
            "[1]",
            "--r-prime",
            "1",
        ]);
        assert!(s["chi"].as_i64().unwrap() > 0);
    }

    #[test]
    fn table_output() {
        let o = mukai(&["--output", "table", "partners", "--n", "1"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("class_count\t1\n"));
    }

    #[test]
    fn every_operation_has_one_subcommand() {
        let cmd = Cli::command();
        let names: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
        let mut seen = std::collections::BTreeSet::new();
        for (op, sub) in OPERATIONS {
            assert!(seen.insert(*op), "{op} is listed twice");
            assert!(names.contains(sub), "{op} maps to missing subcommand {sub}");
        }
        // every subcommand beyond selftest serves some operation
        for n in &names {
            assert!(
                *n == "selftest" || OPERATIONS.iter().any(|(_, s)| s == n),
                "{n} exposes nothing"
            );
        }
        // and every public function of the core crate is either exposed or a
        // constructor/accessor
        const PLUMBING: &[&str] = &[
            "new",
            "zero",
            "basis",
            "from_i64",
            "rank",
            "is_zero",
            "add",
            "sub",
            "scale",
            "neg",
            "sup_norm",
            "to_rational",
            "hyperbolic_plane",
            "rank_one",
            "gram",
            "ample",
            "check_dim",
            "point",
            "structure_sheaf",
            "lattice_rank",
            "coords",
            "from_coords",
            "holds",
            "identity",
            "shift",
            "matrix",
            "dim",
            "twist_class",
            "to_complex",
            "b",
            "omega",
            "beta",
            "omega_square",
            "is_nonpositive_real",
            "irrational",
            "is_rational",
            "compare_slope",
            "points",
            "is_zero_dimensional",
            "torsion",
            "from_factors",
            "is_torsion_free",
            "is_pure_torsion",
            "c1",
            "torsion_length",
            "is_member",
            "class",
            "with_r_prime_at_least_rank",
            "n",
            "lattice",
            "mukai_vector",
        ];
        let src = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/src");
        for entry in std::fs::read_dir(src).unwrap() {
            let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
            let body = text.split("#[cfg(test)]").next().unwrap();
            for line in body.lines() {
                let Some(rest) = line.trim_start().strip_prefix("pub fn ") else {
                    continue;
                };
                let name: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
                assert!(
                    PLUMBING.contains(&name.as_str()) || OPERATIONS.iter().any(|(op, _)| *op == name),
                    "core function {name} is not reachable from any subcommand"
                );
            }
        }
    }
}
