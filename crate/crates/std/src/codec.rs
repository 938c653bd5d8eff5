//! JSON encodings of lattices, Mukai vectors, sheaf profiles and results.
//!
//! Integers are JSON numbers of any size. Rationals are strings "p/q" in
//! lowest terms (q ≥ 1, always written); on input a bare integer or "p"
//! is accepted too. Floats are rejected everywhere.

use mukai_core::isometry::{ComplexMukai, MukaiIsometry, RatMukai};
use mukai_core::mukai::ChernData;
use mukai_core::stability::{CentralCharge, Factor, FormalSheaf, NumericalComplex, Torsion};
use mukai_core::{Int, IntersectionLattice, MukaiVector, NsClass, Rat, RatClass};
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Number, Value};

use crate::error::CliError;

pub fn parse(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::malformed(format!("{what}: {e}")))
}

fn kind_of(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

pub fn object<'a>(v: &'a Value, ctx: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, CliError> {
    let m = v
        .as_object()
        .ok_or_else(|| CliError::malformed(format!("{ctx}: expected an object, found {}", kind_of(v))))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::malformed(format!("{ctx}: unknown key {k:?}")));
    }
    Ok(m)
}

pub fn field<'a>(m: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value, CliError> {
    m.get(key)
        .ok_or_else(|| CliError::malformed(format!("{ctx}: missing key {key:?}")))
}

fn array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::malformed(format!("{ctx}: expected an array, found {}", kind_of(v))))
}

pub fn int(v: &Value, ctx: &str) -> Result<Int, CliError> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| CliError::malformed(format!("{ctx}: {n} is not an integer"))),
        other => Err(CliError::malformed(format!(
            "{ctx}: expected an integer, found {}",
            kind_of(other)
        ))),
    }
}

/// Parses "p/q", "p" or an integer literal.
pub fn rat_str(s: &str, ctx: &str) -> Result<Rat, CliError> {
    let bad = || CliError::malformed(format!("{ctx}: {s:?} is not a rational of the form p/q"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: Int = p.parse().map_err(|_| bad())?;
    let q: Int = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(CliError::validation(format!("{ctx}: zero denominator in {s:?}")));
    }
    Ok(Rat::new(p, q))
}

pub fn rat(v: &Value, ctx: &str) -> Result<Rat, CliError> {
    match v {
        Value::String(s) => rat_str(s, ctx),
        Value::Number(_) => Ok(Rat::from_integer(int(v, ctx)?)),
        other => Err(CliError::malformed(format!(
            "{ctx}: expected a rational \"p/q\", found {}",
            kind_of(other)
        ))),
    }
}

pub fn ns_class(v: &Value, ctx: &str) -> Result<NsClass, CliError> {
    let items = array(v, ctx)?;
    let coords = items
        .iter()
        .enumerate()
        .map(|(i, x)| int(x, &format!("{ctx}[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(NsClass(coords))
}

pub fn rat_class(v: &Value, ctx: &str) -> Result<RatClass, CliError> {
    let items = array(v, ctx)?;
    let coords = items
        .iter()
        .enumerate()
        .map(|(i, x)| rat(x, &format!("{ctx}[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(RatClass(coords))
}

pub fn lattice(v: &Value) -> Result<IntersectionLattice, CliError> {
    let ctx = "lattice";
    let m = object(v, ctx, &["rank", "gram", "ample"])?;
    let rank = int(field(m, "rank", ctx)?, "lattice.rank")?;
    let rows = array(field(m, "gram", ctx)?, "lattice.gram")?;
    let gram: Vec<Vec<Int>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let row = array(row, &format!("lattice.gram[{i}]"))?;
            row.iter()
                .enumerate()
                .map(|(j, x)| int(x, &format!("lattice.gram[{i}][{j}]")))
                .collect()
        })
        .collect::<Result<_, CliError>>()?;
    if rank != Int::from(gram.len()) {
        return Err(CliError::validation(format!(
            "lattice: rank is {rank} but gram has {} rows",
            gram.len()
        )));
    }
    let ample = ns_class(field(m, "ample", ctx)?, "lattice.ample")?;
    IntersectionLattice::new(gram, ample).map_err(|e| CliError::validation(format!("lattice: {e}")))
}

pub fn mukai_vector(v: &Value, ctx: &str) -> Result<MukaiVector, CliError> {
    let m = object(v, ctx, &["r", "l", "s"])?;
    Ok(MukaiVector {
        r: int(field(m, "r", ctx)?, &format!("{ctx}.r"))?,
        l: ns_class(field(m, "l", ctx)?, &format!("{ctx}.l"))?,
        s: int(field(m, "s", ctx)?, &format!("{ctx}.s"))?,
    })
}

pub fn rat_mukai(v: &Value, ctx: &str) -> Result<RatMukai, CliError> {
    let m = object(v, ctx, &["r", "l", "s"])?;
    Ok(RatMukai {
        r: rat(field(m, "r", ctx)?, &format!("{ctx}.r"))?,
        l: rat_class(field(m, "l", ctx)?, &format!("{ctx}.l"))?,
        s: rat(field(m, "s", ctx)?, &format!("{ctx}.s"))?,
    })
}

/// {"re": class, "im": class}; a missing "im" means a real class.
pub fn complex_mukai(v: &Value, ctx: &str) -> Result<ComplexMukai, CliError> {
    let m = object(v, ctx, &["re", "im"])?;
    let re = rat_mukai(field(m, "re", ctx)?, &format!("{ctx}.re"))?;
    let im = match m.get("im") {
        Some(im) => rat_mukai(im, &format!("{ctx}.im"))?,
        None => RatMukai::zero(re.l.rank()),
    };
    Ok(ComplexMukai { re, im })
}

pub fn chern(v: &Value, ctx: &str) -> Result<ChernData, CliError> {
    let m = object(v, ctx, &["rank", "c1", "c2"])?;
    Ok(ChernData {
        rank: int(field(m, "rank", ctx)?, &format!("{ctx}.rank"))?,
        c1: ns_class(field(m, "c1", ctx)?, &format!("{ctx}.c1"))?,
        c2: int(field(m, "c2", ctx)?, &format!("{ctx}.c2"))?,
    })
}

pub fn formal_sheaf(v: &Value, ctx: &str) -> Result<FormalSheaf, CliError> {
    let m = object(v, ctx, &["torsion", "factors"])?;
    let torsion = match m.get("torsion") {
        None | Some(Value::Null) => None,
        Some(t) => {
            let tctx = format!("{ctx}.torsion");
            let tm = object(t, &tctx, &["degree", "length"])?;
            Some(Torsion {
                degree: ns_class(field(tm, "degree", &tctx)?, &format!("{tctx}.degree"))?,
                length: int(field(tm, "length", &tctx)?, &format!("{tctx}.length"))?,
            })
        }
    };
    let factors = match m.get("factors") {
        None => Vec::new(),
        Some(f) => array(f, &format!("{ctx}.factors"))?
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let fctx = format!("{ctx}.factors[{i}]");
                let fm = object(f, &fctx, &["rank", "c1"])?;
                Ok(Factor {
                    rank: int(field(fm, "rank", &fctx)?, &format!("{fctx}.rank"))?,
                    c1: ns_class(field(fm, "c1", &fctx)?, &format!("{fctx}.c1"))?,
                })
            })
            .collect::<Result<_, CliError>>()?,
    };
    Ok(FormalSheaf { torsion, factors })
}

pub fn numerical_complex(v: &Value, ctx: &str) -> Result<NumericalComplex, CliError> {
    let m = object(v, ctx, &["h_minus1", "h0"])?;
    let part = |key: &str| match m.get(key) {
        None | Some(Value::Null) => Ok(FormalSheaf::zero()),
        Some(s) => formal_sheaf(s, &format!("{ctx}.{key}")),
    };
    Ok(NumericalComplex {
        h_minus1: part("h_minus1")?,
        h0: part("h0")?,
    })
}

pub fn matrix(v: &Value, ctx: &str) -> Result<Vec<Vec<Int>>, CliError> {
    array(v, ctx)?
        .iter()
        .enumerate()
        .map(|(i, row)| Ok(ns_class(row, &format!("{ctx}[{i}]"))?.0))
        .collect()
}

// ---------------------------------------------------------------------------
// Encoding

pub fn int_json(i: &Int) -> Value {
    let n: Number = i.to_string().parse().expect("integer literal");
    Value::Number(n)
}

pub fn rat_string(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rat_json(q: &Rat) -> Value {
    Value::String(rat_string(q))
}

pub fn ns_json(x: &NsClass) -> Value {
    Value::Array(x.0.iter().map(int_json).collect())
}

pub fn rat_class_json(x: &RatClass) -> Value {
    Value::Array(x.0.iter().map(rat_json).collect())
}

pub fn mukai_json(v: &MukaiVector) -> Value {
    json!({"r": int_json(&v.r), "l": ns_json(&v.l), "s": int_json(&v.s)})
}

pub fn rat_mukai_json(v: &RatMukai) -> Value {
    json!({"r": rat_json(&v.r), "l": rat_class_json(&v.l), "s": rat_json(&v.s)})
}

pub fn complex_json(x: &ComplexMukai) -> Value {
    json!({"re": rat_mukai_json(&x.re), "im": rat_mukai_json(&x.im)})
}

pub fn chern_json(c: &ChernData) -> Value {
    json!({"rank": int_json(&c.rank), "c1": ns_json(&c.c1), "c2": int_json(&c.c2)})
}

pub fn lattice_json(l: &IntersectionLattice) -> Value {
    json!({
        "rank": l.rank(),
        "gram": l.gram().iter().map(|row| Value::Array(row.iter().map(int_json).collect())).collect::<Vec<_>>(),
        "ample": ns_json(l.ample()),
    })
}

pub fn matrix_json(m: &[Vec<Int>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(int_json).collect()))
            .collect(),
    )
}

/// An isometry with its validity stamp.
pub fn isometry_json(m: &MukaiIsometry) -> Value {
    json!({
        "matrix": matrix_json(m.matrix()),
        "valid": true,
        "determinant": int_json(&m.determinant()),
        "fixes_point_class": m.fixes_point_class(),
    })
}

pub fn charge_json(z: &CentralCharge) -> Value {
    json!({"re": rat_json(&z.re), "im": rat_json(&z.im)})
}

pub fn sheaf_json(f: &FormalSheaf) -> Value {
    let torsion = match &f.torsion {
        Some(t) => json!({"degree": ns_json(&t.degree), "length": int_json(&t.length)}),
        None => Value::Null,
    };
    let factors: Vec<Value> = f
        .factors
        .iter()
        .map(|x| json!({"rank": int_json(&x.rank), "c1": ns_json(&x.c1)}))
        .collect();
    json!({"torsion": torsion, "factors": factors})
}

// ---------------------------------------------------------------------------
// Display-only approximations

fn parse_rat_string(s: &str) -> Option<f64> {
    let (p, q) = s.split_once('/')?;
    let p: Int = p.parse().ok()?;
    let q: Int = q.parse().ok()?;
    Some(p.to_f64()? / q.to_f64()?)
}

fn approx_of(v: &Value) -> Option<Value> {
    match v {
        Value::String(s) => parse_rat_string(s).and_then(Number::from_f64).map(Value::Number),
        Value::Array(items) if !items.is_empty() => {
            let xs: Option<Vec<Value>> = items.iter().map(approx_of).collect();
            xs.map(Value::Array)
        }
        _ => None,
    }
}

/// Adds a float field `<key>_approx` next to every rational (or array of
/// rationals) in the tree. The exact fields are left untouched.
pub fn with_approx(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut out = Map::new();
            for (k, x) in m {
                if let Some(a) = approx_of(&x) {
                    out.insert(format!("{k}_approx"), a);
                }
                out.insert(k, with_approx(x));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(with_approx).collect()),
        other => other,
    }
}

/// `key.path<TAB>value` lines, one per leaf.
pub fn to_table(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, x, out);
                }
            }
            Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            leaf => {
                let shown = match leaf {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(prefix);
                out.push('\t');
                out.push_str(&shown);
                out.push('\n');
            }
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
