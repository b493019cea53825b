//! JSON wire formats.
//!
//! Measures:
//!
//! ```json
//! {"type":"atomic","atoms":[{"angle":0.0,"weight":0.5}, ...]}
//! {"type":"moments","m":[[re,im], ...]}
//! {"type":"structured","f":F}
//! ```
//!
//! where `F` is one of
//!
//! ```json
//! {"kind":"zero"}
//! {"kind":"constant","c":[re,im]}
//! {"kind":"blaschke","p":0,"factors":[{"alpha":[re,im],"mult":1}],"phase":[re,im]}
//! {"kind":"expherglotz","b":0.0,"rho":RHO}
//! {"kind":"series","coeffs":[[re,im], ...]}
//! ```
//!
//! and `RHO = {"mass":1.0,"r":[[re,im], ...],"atoms":null | [{"angle":..,"weight":..}, ...]}`.
//! A characteristic pair is `{"b":0.0,"rho":RHO}`.
//!
//! Output is compact and every float is written with 17 significant digits, so
//! identical values always serialize to identical bytes and re-parse exactly.

use std::io;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gallery::SingularExampleResult;
use crate::levy::{DivisibilityVerdict, ZeroWitness};
use crate::measure::{AtomicMeasure, CircleMeasure, FiniteCircleMeasure};
use crate::series::TruncatedSeries;
use crate::transform::{BlaschkeFactor, HerglotzData, StructuredF};

struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serialize with 17 significant digits per float, followed by a newline.
pub fn to_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    serde::Serialize::serialize(value, &mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

fn num(x: f64) -> Value {
    // non-finite values never reach here; null keeps the output parseable if they do
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex_value(c: Complex64) -> Value {
    Value::Array(vec![num(c.re), num(c.im)])
}

pub fn complex_list(cs: &[Complex64]) -> Value {
    Value::Array(cs.iter().map(|c| complex_value(*c)).collect())
}

pub fn real_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

fn atoms_value(a: &AtomicMeasure) -> Value {
    Value::Array(
        a.angles
            .iter()
            .zip(&a.weights)
            .map(|(t, w)| json!({"angle": num(*t), "weight": num(*w)}))
            .collect(),
    )
}

pub fn finite_measure_value(rho: &FiniteCircleMeasure) -> Value {
    json!({
        "mass": num(rho.mass),
        "r": complex_list(&rho.r),
        "atoms": rho.atoms.as_ref().map_or(Value::Null, atoms_value),
    })
}

pub fn pair_value(pair: &HerglotzData) -> Value {
    json!({"b": num(pair.b), "rho": finite_measure_value(&pair.rho)})
}

pub fn series_value(s: &TruncatedSeries) -> Value {
    complex_list(s.coeffs())
}

pub fn structured_value(f: &StructuredF) -> Value {
    match f {
        StructuredF::Zero => json!({"kind": "zero"}),
        StructuredF::Constant(c) => json!({"kind": "constant", "c": complex_value(*c)}),
        StructuredF::Blaschke { p, factors, phase } => json!({
            "kind": "blaschke",
            "p": p,
            "factors": factors
                .iter()
                .map(|f| json!({"alpha": complex_value(f.alpha), "mult": f.multiplicity}))
                .collect::<Vec<_>>(),
            "phase": complex_value(*phase),
        }),
        StructuredF::ExpHerglotz(h) => json!({
            "kind": "expherglotz",
            "b": num(h.b),
            "rho": finite_measure_value(&h.rho),
        }),
        StructuredF::Series(s) => json!({"kind": "series", "coeffs": series_value(s)}),
    }
}

pub fn measure_value(mu: &CircleMeasure) -> Value {
    match mu {
        CircleMeasure::Atomic(a) => json!({"type": "atomic", "atoms": atoms_value(a)}),
        CircleMeasure::Moments(m) => json!({"type": "moments", "m": complex_list(m)}),
        CircleMeasure::Structured(f) => json!({"type": "structured", "f": structured_value(f)}),
    }
}

pub fn verdict_value(v: &DivisibilityVerdict) -> Value {
    match v {
        DivisibilityVerdict::Divisible { pair } => {
            json!({"verdict": "divisible", "pair": pair_value(pair)})
        }
        DivisibilityVerdict::HaarDivisible => json!({"verdict": "haar_divisible"}),
        DivisibilityVerdict::NotDivisible { witness } => {
            let w = match witness {
                ZeroWitness::ZeroAtOrigin => json!({"kind": "zero_at_origin"}),
                ZeroWitness::InteriorZero { location, radius } => json!({
                    "kind": "interior_zero",
                    "location": complex_value(*location),
                    "radius": num(*radius),
                }),
            };
            json!({"verdict": "not_divisible", "witness": w})
        }
        DivisibilityVerdict::DivisibleUpToRadius { radius, pair } => json!({
            "verdict": "divisible_up_to_radius",
            "radius": num(*radius),
            "pair": pair_value(pair),
        }),
    }
}

pub fn singular_example_value(res: &SingularExampleResult) -> Value {
    json!({
        "beta": num(res.beta),
        "zeros": real_list(&res.zeros),
        "offsets": real_list(&res.offsets),
        "atom_angles": real_list(&res.atom_angles),
        "atom_masses": real_list(&res.atom_masses),
    })
}

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidMeasure(format!("{path}: {msg}"))
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidMeasure(format!("malformed JSON: {e}")))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(path, format!("missing field \"{key}\"")))
}

fn real(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| schema(path, "expected a finite number"))
}

fn unsigned(v: &Value, path: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array"))
}

pub fn parse_complex(v: &Value, path: &str) -> Result<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex64::new(
            real(re, &format!("{path}[0]"))?,
            real(im, &format!("{path}[1]"))?,
        )),
        _ => Err(schema(path, "expected [re, im]")),
    }
}

fn parse_complex_list(v: &Value, path: &str) -> Result<Vec<Complex64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| parse_complex(c, &format!("{path}[{i}]")))
        .collect()
}

fn parse_atoms(v: &Value, path: &str) -> Result<AtomicMeasure> {
    let mut angles = Vec::new();
    let mut weights = Vec::new();
    for (i, a) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let obj = object(a, &p)?;
        angles.push(real(field(obj, "angle", &p)?, &format!("{p}.angle"))?);
        weights.push(real(field(obj, "weight", &p)?, &format!("{p}.weight"))?);
    }
    AtomicMeasure::new(angles, weights)
}

pub fn parse_finite_measure(v: &Value, path: &str) -> Result<FiniteCircleMeasure> {
    let obj = object(v, path)?;
    let mass = real(field(obj, "mass", path)?, &format!("{path}.mass"))?;
    let r = parse_complex_list(field(obj, "r", path)?, &format!("{path}.r"))?;
    let atoms = match obj.get("atoms") {
        None | Some(Value::Null) => None,
        Some(a) => Some(parse_atoms(a, &format!("{path}.atoms"))?),
    };
    if mass < 0.0 {
        return Err(schema(&format!("{path}.mass"), "must be non-negative"));
    }
    if let Some(a) = &atoms {
        if (a.total() - mass).abs() > 1e-12 * mass.max(1.0) {
            return Err(schema(path, "atom weights do not add up to mass"));
        }
    }
    Ok(FiniteCircleMeasure { mass, r, atoms })
}

pub fn parse_pair(v: &Value, path: &str) -> Result<HerglotzData> {
    let obj = object(v, path)?;
    let b = real(field(obj, "b", path)?, &format!("{path}.b"))?;
    let rho = parse_finite_measure(field(obj, "rho", path)?, &format!("{path}.rho"))?;
    Ok(HerglotzData::new(b, rho))
}

pub fn parse_structured(v: &Value, path: &str) -> Result<StructuredF> {
    let obj = object(v, path)?;
    let kind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| schema(&format!("{path}.kind"), "expected a string"))?;
    match kind {
        "zero" => Ok(StructuredF::Zero),
        "constant" => Ok(StructuredF::Constant(parse_complex(
            field(obj, "c", path)?,
            &format!("{path}.c"),
        )?)),
        "blaschke" => {
            let p = unsigned(field(obj, "p", path)?, &format!("{path}.p"))?;
            let phase = parse_complex(field(obj, "phase", path)?, &format!("{path}.phase"))?;
            let mut factors = Vec::new();
            for (i, f) in array(field(obj, "factors", path)?, &format!("{path}.factors"))?
                .iter()
                .enumerate()
            {
                let fp = format!("{path}.factors[{i}]");
                let fo = object(f, &fp)?;
                factors.push(BlaschkeFactor {
                    alpha: parse_complex(field(fo, "alpha", &fp)?, &format!("{fp}.alpha"))?,
                    multiplicity: unsigned(field(fo, "mult", &fp)?, &format!("{fp}.mult"))?,
                });
            }
            Ok(StructuredF::Blaschke { p, factors, phase })
        }
        "expherglotz" => Ok(StructuredF::ExpHerglotz(parse_pair(v, path)?)),
        "series" => {
            let coeffs =
                parse_complex_list(field(obj, "coeffs", path)?, &format!("{path}.coeffs"))?;
            Ok(StructuredF::Series(TruncatedSeries::new(coeffs)?))
        }
        other => Err(schema(
            &format!("{path}.kind"),
            format!("unknown kind \"{other}\""),
        )),
    }
}

pub fn parse_measure_value(v: &Value) -> Result<CircleMeasure> {
    let obj = object(v, "$")?;
    let ty = field(obj, "type", "$")?
        .as_str()
        .ok_or_else(|| schema("$.type", "expected a string"))?;
    match ty {
        "atomic" => Ok(CircleMeasure::Atomic(parse_atoms(
            field(obj, "atoms", "$")?,
            "$.atoms",
        )?)),
        "moments" => Ok(CircleMeasure::Moments(parse_complex_list(
            field(obj, "m", "$")?,
            "$.m",
        )?)),
        "structured" => Ok(CircleMeasure::Structured(parse_structured(
            field(obj, "f", "$")?,
            "$.f",
        )?)),
        other => Err(schema("$.type", format!("unknown type \"{other}\""))),
    }
}

pub fn parse_measure(text: &str) -> Result<CircleMeasure> {
    parse_measure_value(&parse_value(text)?)
}

pub fn parse_pair_str(text: &str) -> Result<HerglotzData> {
    parse_pair(&parse_value(text)?, "$")
}

pub fn measure_to_string(mu: &CircleMeasure) -> String {
    to_string(&measure_value(mu))
}

pub fn pair_to_string(pair: &HerglotzData) -> String {
    to_string(&pair_value(pair))
}
