//! JSON and CSV forms of the reports.
//!
//! JSON objects use sorted keys. Rationals are `{"num", "den"}` decimal
//! strings plus an `approx` float that parsing ignores; `QuadExt` values
//! are `{"a", "b", "sqrt_base"}`. Emitting a parsed report reproduces the
//! input byte for byte.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
pub use serde_json::Value;
use serde_json::{json, Number};

use crate::bounds::{BoundReport, QuadExt, VerifyReport};
use crate::error::{Error, Result};
use crate::exactnum::{ExactRational, PrimePower, Sign};
use crate::forms::FormKind;
use crate::oracle::{CountMethod, CountReport, MixingSuiteReport, YCase};
use crate::spectrum::{eigen_exponents, eigen_exponents_via_characters, HalfInteger};

fn bad(msg: impl Into<String>) -> Error {
    Error::Report(msg.into())
}

fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn big_number(n: &BigUint) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("decimal integer"))
}

pub fn rational_json(r: &ExactRational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "approx": float(r.to_f64().unwrap_or(f64::NAN)),
    })
}

pub fn quad_json(x: &QuadExt) -> Value {
    json!({
        "a": rational_json(x.a()),
        "b": rational_json(x.b()),
        "sqrt_base": big_number(x.radicand()),
        "approx": float(x.approx()),
    })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field `{key}`")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| bad(format!("`{key}` is not a string")))
}

fn u64_field(v: &Value, key: &str) -> Result<u64> {
    field(v, key)?.as_u64().ok_or_else(|| bad(format!("`{key}` is not an unsigned integer")))
}

fn bool_field(v: &Value, key: &str) -> Result<bool> {
    field(v, key)?.as_bool().ok_or_else(|| bad(format!("`{key}` is not a boolean")))
}

fn f64_field(v: &Value, key: &str) -> Result<f64> {
    field(v, key)?.as_f64().ok_or_else(|| bad(format!("`{key}` is not a number")))
}

fn opt<T>(v: &Value, key: &str, parse: impl Fn(&Value) -> Result<T>) -> Result<Option<T>> {
    match field(v, key)? {
        Value::Null => Ok(None),
        x => parse(x).map(Some),
    }
}

pub fn rational_from_json(v: &Value) -> Result<ExactRational> {
    let num = BigInt::from_str(str_field(v, "num")?).map_err(|e| bad(format!("num: {e}")))?;
    let den = BigInt::from_str(str_field(v, "den")?).map_err(|e| bad(format!("den: {e}")))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(ExactRational::new(num, den))
}

pub fn quad_from_json(v: &Value) -> Result<QuadExt> {
    let n = field(v, "sqrt_base")?;
    let radicand = BigUint::from_str(&n.to_string()).map_err(|e| bad(format!("sqrt_base: {e}")))?;
    Ok(QuadExt::new(rational_from_json(field(v, "a")?)?, rational_from_json(field(v, "b")?)?, radicand))
}

fn sign_json(s: Option<Sign>) -> Value {
    s.map_or(Value::Null, |s| Value::String(s.symbol().into()))
}

fn sign_from(v: &Value) -> Result<Sign> {
    v.as_str().and_then(Sign::parse).ok_or_else(|| bad("bad sign"))
}

fn kind_from(v: &Value, key: &str) -> Result<FormKind> {
    FormKind::parse(str_field(v, key)?).ok_or_else(|| bad(format!("unknown family in `{key}`")))
}

fn opt_u32(v: &Value) -> Result<u32> {
    v.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| bad("bad dimension"))
}

pub fn bound_json(b: &BoundReport) -> Value {
    json!({
        "family": b.family.name(),
        "eps": sign_json(b.eps),
        "sigma1": sign_json(b.sigma1),
        "sigma2": sign_json(b.sigma2),
        "e1": b.e1,
        "e2": b.e2,
        "q": b.q,
        "alpha1": b.alpha1.as_ref().map_or(Value::Null, rational_json),
        "alpha2": b.alpha2.as_ref().map_or(Value::Null, rational_json),
        "lower_bound": quad_json(&b.lower_bound),
        "threshold": rational_json(&b.threshold),
        "strict": b.strict,
        "pass": b.pass,
        "equality": b.equality(),
        "formula_id": b.formula_id,
        "relaxed_bound": b.relaxed_bound.as_ref().map_or(Value::Null, quad_json),
        "exception": b.exception,
        "seconds": float(b.seconds),
    })
}

pub fn bound_from_json(v: &Value) -> Result<BoundReport> {
    Ok(BoundReport {
        family: kind_from(v, "family")?,
        eps: opt(v, "eps", sign_from)?,
        sigma1: opt(v, "sigma1", sign_from)?,
        sigma2: opt(v, "sigma2", sign_from)?,
        e1: opt(v, "e1", opt_u32)?,
        e2: opt(v, "e2", opt_u32)?,
        q: u64_field(v, "q")?,
        alpha1: opt(v, "alpha1", rational_from_json)?,
        alpha2: opt(v, "alpha2", rational_from_json)?,
        lower_bound: quad_from_json(field(v, "lower_bound")?)?,
        threshold: rational_from_json(field(v, "threshold")?)?,
        strict: bool_field(v, "strict")?,
        pass: bool_field(v, "pass")?,
        formula_id: str_field(v, "formula_id")?.to_string(),
        relaxed_bound: opt(v, "relaxed_bound", quad_from_json)?,
        exception: bool_field(v, "exception")?,
        seconds: f64_field(v, "seconds")?,
    })
}

pub fn ycase_json(c: &YCase) -> Value {
    json!({
        "kind": c.kind.name(),
        "eps": sign_json(c.eps),
        "sigma": sign_json(c.sigma),
        "d": c.d,
        "e": c.e,
        "q": c.q,
    })
}

pub fn ycase_from_json(v: &Value) -> Result<YCase> {
    Ok(YCase {
        kind: kind_from(v, "kind")?,
        eps: opt(v, "eps", sign_from)?,
        sigma: opt(v, "sigma", sign_from)?,
        d: u64_field(v, "d")? as usize,
        e: u64_field(v, "e")? as usize,
        q: u64_field(v, "q")?,
    })
}

pub fn count_json(c: &CountReport) -> Value {
    json!({
        "case1": ycase_json(&c.case1),
        "case2": ycase_json(&c.case2),
        "y1": c.y1,
        "y2": c.y2,
        "alpha1": rational_json(&c.alpha1),
        "alpha2": rational_json(&c.alpha2),
        "pairs": c.pairs,
        "proportion": rational_json(&c.proportion),
        "threshold": rational_json(&c.threshold),
        "pass": c.pass,
        "method": c.method.name(),
        "seconds": float(c.seconds),
    })
}

pub fn count_from_json(v: &Value) -> Result<CountReport> {
    Ok(CountReport {
        case1: ycase_from_json(field(v, "case1")?)?,
        case2: ycase_from_json(field(v, "case2")?)?,
        y1: u64_field(v, "y1")?,
        y2: u64_field(v, "y2")?,
        alpha1: rational_from_json(field(v, "alpha1")?)?,
        alpha2: rational_from_json(field(v, "alpha2")?)?,
        pairs: u64_field(v, "pairs")?,
        proportion: rational_from_json(field(v, "proportion")?)?,
        threshold: rational_from_json(field(v, "threshold")?)?,
        pass: bool_field(v, "pass")?,
        method: CountMethod::parse(str_field(v, "method")?).ok_or_else(|| bad("unknown method"))?,
        seconds: f64_field(v, "seconds")?,
    })
}

fn array<T>(v: &Value, key: &str, parse: impl Fn(&Value) -> Result<T>) -> Result<Vec<T>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| bad(format!("`{key}` is not an array")))?
        .iter()
        .map(parse)
        .collect()
}

pub fn verify_json(r: &VerifyReport) -> Value {
    json!({
        "family": r.family.name(),
        "pass": r.pass(),
        "first_failure": r.first_failure(),
        "bounds": r.bounds.iter().map(bound_json).collect::<Vec<_>>(),
        "counts": r.counts.iter().map(count_json).collect::<Vec<_>>(),
        "dispatched": r.dispatched.iter().map(|&(q, m2, m1)| json!({"q": q, "m2": m2, "m1": m1})).collect::<Vec<_>>(),
    })
}

pub fn verify_from_json(v: &Value) -> Result<VerifyReport> {
    let dispatched = array(v, "dispatched", |t| {
        Ok((u64_field(t, "q")?, u64_field(t, "m2")? as u32, u64_field(t, "m1")? as u32))
    })?;
    Ok(VerifyReport {
        family: kind_from(v, "family")?,
        bounds: array(v, "bounds", bound_from_json)?,
        counts: array(v, "counts", count_from_json)?,
        dispatched,
    })
}

/// Exponents, eigenvalues and the character-route cross-check for one
/// `Gamma_{e1,e2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub e1: u32,
    pub e2: u32,
    pub q: u64,
    pub exponents: Vec<HalfInteger>,
    /// `+-q^{m_j}` magnitudes, exact.
    pub eigenvalues: Vec<String>,
    pub character_route_agrees: bool,
}

pub fn spectrum_report(e1: u32, e2: u32, q: u64) -> Result<SpectrumReport> {
    let pq = PrimePower::new(q)?;
    let closed = eigen_exponents(e1, e2)?;
    let chars = eigen_exponents_via_characters(e1, e2)?;
    Ok(SpectrumReport {
        e1,
        e2,
        q,
        eigenvalues: closed.eigenvalue_strings(pq),
        character_route_agrees: closed == chars,
        exponents: closed.exponents,
    })
}

fn half_from(v: &Value) -> Result<HalfInteger> {
    let s = v.as_str().ok_or_else(|| bad("exponent is not a string"))?;
    let parsed = match s.strip_suffix("/2") {
        Some(t) => t.parse::<i64>().map(HalfInteger::from_twice),
        None => s.parse::<i64>().map(HalfInteger::from_int),
    };
    parsed.map_err(|e| bad(format!("exponent `{s}`: {e}")))
}

pub fn spectrum_json(r: &SpectrumReport) -> Value {
    json!({
        "e1": r.e1,
        "e2": r.e2,
        "q": r.q,
        "exponents": r.exponents.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "eigenvalues": r.eigenvalues,
        "character_route_agrees": r.character_route_agrees,
    })
}

pub fn spectrum_from_json(v: &Value) -> Result<SpectrumReport> {
    Ok(SpectrumReport {
        e1: u64_field(v, "e1")? as u32,
        e2: u64_field(v, "e2")? as u32,
        q: u64_field(v, "q")?,
        exponents: array(v, "exponents", half_from)?,
        eigenvalues: array(v, "eigenvalues", |x| {
            x.as_str().map(str::to_string).ok_or_else(|| bad("eigenvalue is not a string"))
        })?,
        character_route_agrees: bool_field(v, "character_route_agrees")?,
    })
}

pub fn mixing_json(r: &MixingSuiteReport) -> Value {
    json!({
        "e1": r.e1,
        "e2": r.e2,
        "q": r.q,
        "seed": r.seed,
        "random_pairs": r.random_pairs,
        "checked": r.checked,
        "held": r.held,
        "equalities": r.equalities,
        "char_poly_checked": r.char_poly_checked,
        "char_poly_held": r.char_poly_held,
        "first_failure": r.first_failure,
        "pass": r.pass(),
    })
}

pub fn mixing_from_json(v: &Value) -> Result<MixingSuiteReport> {
    Ok(MixingSuiteReport {
        e1: u64_field(v, "e1")? as usize,
        e2: u64_field(v, "e2")? as usize,
        q: u64_field(v, "q")?,
        seed: u64_field(v, "seed")?,
        random_pairs: u64_field(v, "random_pairs")? as usize,
        checked: u64_field(v, "checked")? as usize,
        held: u64_field(v, "held")? as usize,
        equalities: u64_field(v, "equalities")? as usize,
        char_poly_checked: u64_field(v, "char_poly_checked")? as usize,
        char_poly_held: u64_field(v, "char_poly_held")? as usize,
        first_failure: opt(v, "first_failure", |x| {
            x.as_str().map(str::to_string).ok_or_else(|| bad("first_failure is not a string"))
        })?,
    })
}

/// Canonical text: sorted keys, two-space indentation.
pub fn to_json_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

pub fn parse_json(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| bad(e.to_string()))
}

pub const CSV_COLUMNS: [&str; 14] = [
    "family", "eps", "sigma1", "sigma2", "e1", "e2", "q", "alpha1", "alpha2", "bound", "threshold", "pass", "method",
    "seconds",
];

fn cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn bound_csv_row(b: &BoundReport) -> Vec<String> {
    vec![
        b.family.name().into(),
        cell(b.eps),
        cell(b.sigma1),
        cell(b.sigma2),
        cell(b.e1),
        cell(b.e2),
        b.q.to_string(),
        cell(b.alpha1.as_ref()),
        cell(b.alpha2.as_ref()),
        b.lower_bound.to_string(),
        b.threshold.to_string(),
        b.pass.to_string(),
        b.formula_id.clone(),
        b.seconds.to_string(),
    ]
}

pub fn count_csv_row(c: &CountReport) -> Vec<String> {
    vec![
        c.case1.kind.name().into(),
        cell(c.case1.eps),
        cell(c.case1.sigma),
        cell(c.case2.sigma),
        c.case1.e.to_string(),
        c.case2.e.to_string(),
        c.case1.q.to_string(),
        c.alpha1.to_string(),
        c.alpha2.to_string(),
        c.proportion.to_string(),
        c.threshold.to_string(),
        c.pass.to_string(),
        c.method.name().into(),
        c.seconds.to_string(),
    ]
}
