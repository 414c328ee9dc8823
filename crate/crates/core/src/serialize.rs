//! Canonical JSON for matrices, formal elements, coefficient tables and input files.
//!
//! Output is deterministic: object keys are written in a fixed order, floats
//! with 17 significant digits, rationals as `"num/den"` strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::formal::word::{bits_to_mask, mask_to_bits};
use crate::formal::{FormalElement, Letter, Mask, Word};
use crate::matrix::DenseMatrix;
use crate::omega::custom::FreeCoeffData;
use crate::omega::tables::{CoeffTable, TableKey};
use crate::rational::Rational;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

// ---- writer -----------------------------------------------------------------

/// `x` with 17 significant digits; always valid JSON.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Canonical text of `v`, newline-terminated.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn float(x: f64) -> Result<Value> {
    Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| parse_err(format!("non-finite number {x}")))
}

// ---- readers ------------------------------------------------------------------

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("{what} must be a non-negative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(format!("{what} must be a number")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what} must be an array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| parse_err(format!("{what} must be a string")))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

// ---- rationals, words ---------------------------------------------------------

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_fraction_string())
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or(0))),
        _ => Err(parse_err("coefficients must be \"num/den\" strings")),
    }
}

fn letters_to_json(letters: &[Letter], n: usize) -> Value {
    Value::Array(letters.iter().map(|l| json!([l.j, mask_to_bits(l.iota, n)])).collect())
}

fn mask_from_json(v: &Value, n: usize, what: &str) -> Result<Mask> {
    let (m, len) = bits_to_mask(as_str(v, what)?)?;
    if len != n {
        return Err(parse_err(format!("{what} must have {n} bits")));
    }
    Ok(m)
}

fn letters_from_json(v: &Value, n: usize) -> Result<Vec<Letter>> {
    as_array(v, "\"r\"")?
        .iter()
        .map(|pair| {
            let p = as_array(pair, "letter")?;
            if p.len() != 2 {
                return Err(parse_err("a letter is [j, \"ι-bits\"]"));
            }
            let j = as_usize(&p[0], "j")?;
            if j == 0 || j > n {
                return Err(parse_err(format!("letter index j = {j} out of range 1..={n}")));
            }
            Ok(Letter::new(j, mask_from_json(&p[1], n, "ι")?))
        })
        .collect()
}

/// `{"r": [[j, "ι-bits"], ...], "q": "κ-bits"}`.
pub fn word_to_json(w: &Word, n: usize) -> Value {
    let mut m = Map::new();
    m.insert("r".into(), letters_to_json(&w.letters, n));
    m.insert("q".into(), Value::String(mask_to_bits(w.q, n)));
    Value::Object(m)
}

pub fn word_from_json(v: &Value, n: usize) -> Result<Word> {
    Ok(Word { letters: letters_from_json(field(v, "r")?, n)?, q: mask_from_json(field(v, "q")?, n, "\"q\"")? })
}

// ---- formal elements ----------------------------------------------------------

pub fn formal_to_json(x: &FormalElement<Rational>) -> Value {
    let n = x.n();
    let terms: Vec<Value> = x
        .terms()
        .iter()
        .map(|(w, c)| {
            let mut m = Map::new();
            m.insert("r".into(), letters_to_json(&w.letters, n));
            m.insert("q".into(), Value::String(mask_to_bits(w.q, n)));
            m.insert("c".into(), rational_to_json(c));
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("n".into(), json!(n));
    m.insert("degree".into(), json!(x.cap()));
    m.insert("terms".into(), Value::Array(terms));
    Value::Object(m)
}

pub fn formal_from_json(v: &Value) -> Result<FormalElement<Rational>> {
    let n = as_usize(field(v, "n")?, "n")?;
    let cap = as_usize(field(v, "degree")?, "degree")?;
    let mut terms = vec![];
    for t in as_array(field(v, "terms")?, "terms")? {
        terms.push((word_from_json(t, n)?, rational_from_json(field(t, "c")?)?));
    }
    Ok(FormalElement::from_terms(n, cap, terms))
}

// ---- coefficient tables -------------------------------------------------------

fn key_to_json(key: &TableKey, c: &Rational, n: usize, with_k: bool) -> Value {
    let mut m = Map::new();
    if with_k {
        m.insert("k".into(), json!(key.k));
    }
    m.insert("r".into(), letters_to_json(&key.letters, n));
    m.insert("q".into(), Value::String(mask_to_bits(key.kappa, n)));
    m.insert("c".into(), rational_to_json(c));
    Value::Object(m)
}

fn key_from_json(v: &Value, n: usize, with_k: bool) -> Result<(TableKey, Rational)> {
    let k = if with_k { as_usize(field(v, "k")?, "k")? } else { 0 };
    let letters = letters_from_json(field(v, "r")?, n)?;
    let kappa = match v.get("q") {
        Some(q) => mask_from_json(q, n, "\"q\"")?,
        None => 0,
    };
    Ok((TableKey::new(k, letters, kappa), rational_from_json(field(v, "c")?)?))
}

/// Entries in key order; zero coefficients are omitted.
pub fn table_to_json(t: &CoeffTable<Rational>) -> Value {
    let entries: Vec<Value> = t
        .entries
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| key_to_json(k, c, t.n, true))
        .collect();
    let mut m = Map::new();
    m.insert("n".into(), json!(t.n));
    m.insert("degree".into(), json!(t.max_r));
    m.insert("entries".into(), Value::Array(entries));
    Value::Object(m)
}

pub fn table_from_json(v: &Value) -> Result<CoeffTable<Rational>> {
    let n = as_usize(field(v, "n")?, "n")?;
    let max_r = as_usize(field(v, "degree")?, "degree")?;
    let mut entries = BTreeMap::new();
    for e in as_array(field(v, "entries")?, "entries")? {
        let (key, c) = key_from_json(e, n, true)?;
        if key.k == 0 || key.k > n {
            return Err(parse_err(format!("output index k = {} out of range", key.k)));
        }
        if key.degree() > max_r {
            return Err(parse_err("entry above the declared degree"));
        }
        entries.insert(key, c);
    }
    Ok(CoeffTable { n, max_r, entries })
}

/// The `P_0`, `P_1`, `P_2` arrays of each output index, as in the printed tables.
pub fn p_tables_to_json(t: &CoeffTable<Rational>) -> Value {
    let mut m = Map::new();
    for k in 1..=t.n {
        let mut row = Map::new();
        row.insert("p0".into(), rational_to_json(&t.p0(k)));
        if t.max_r >= 1 {
            row.insert("p1".into(), Value::Array(t.p1(k).iter().map(rational_to_json).collect()));
        }
        if t.max_r >= 2 {
            let p2 = t.p2(k).iter().map(|r| Value::Array(r.iter().map(rational_to_json).collect())).collect();
            row.insert("p2".into(), Value::Array(p2));
        }
        m.insert(k.to_string(), Value::Object(row));
    }
    Value::Object(m)
}

// ---- free coefficient data ----------------------------------------------------

pub fn free_data_to_json(p: &FreeCoeffData) -> Value {
    let entries: Vec<Value> = p.entries.iter().map(|(k, c)| key_to_json(k, c, p.n, !p.orth)).collect();
    let mut m = Map::new();
    m.insert("n".into(), json!(p.n));
    m.insert("orth".into(), json!(p.orth));
    m.insert("entries".into(), Value::Array(entries));
    Value::Object(m)
}

/// Loads and runs the admissibility check on every entry.
pub fn free_data_from_json(v: &Value) -> Result<FreeCoeffData> {
    let n = as_usize(field(v, "n")?, "n")?;
    let orth = field(v, "orth")?.as_bool().ok_or_else(|| parse_err("orth must be a boolean"))?;
    let mut p = FreeCoeffData::new(n, orth);
    for e in as_array(field(v, "entries")?, "entries")? {
        let (key, c) = key_from_json(e, n, !orth)?;
        p.insert(key, c)?;
    }
    p.validate()?;
    Ok(p)
}

// ---- matrices -----------------------------------------------------------------

/// `{"d": d, "rows": [[...], ...]}`.
pub fn matrix_to_json(m: &DenseMatrix) -> Result<Value> {
    let rows = m
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| float(x)).collect::<Result<Vec<_>>>().map(Value::Array))
        .collect::<Result<Vec<_>>>()?;
    let mut o = Map::new();
    o.insert("d".into(), json!(m.d()));
    o.insert("rows".into(), Value::Array(rows));
    Ok(Value::Object(o))
}

/// Accepts `{"d", "rows"}`, a nested `[[...], ...]`, or a flat row-major array of length `d²`.
pub fn matrix_from_json(v: &Value, d: Option<usize>) -> Result<DenseMatrix> {
    if v.is_object() {
        let dd = as_usize(field(v, "d")?, "d")?;
        if d.is_some_and(|x| x != dd) {
            return Err(parse_err("matrix dimension disagrees with \"d\""));
        }
        return matrix_from_json(field(v, "rows")?, Some(dd));
    }
    let items = as_array(v, "matrix")?;
    let data: Vec<f64> = if items.first().is_some_and(Value::is_array) {
        let mut data = vec![];
        for row in items {
            let row = as_array(row, "row")?;
            if row.len() != items.len() {
                return Err(parse_err("matrix must be square"));
            }
            for x in row {
                data.push(as_f64(x, "matrix entry")?);
            }
        }
        data
    } else {
        items.iter().map(|x| as_f64(x, "matrix entry")).collect::<Result<_>>()?
    };
    let side = (data.len() as f64).sqrt().round() as usize;
    if side * side != data.len() || side == 0 {
        return Err(parse_err("matrix must be square and nonempty"));
    }
    if d.is_some_and(|x| x != side) {
        return Err(parse_err(format!("expected {}×{} matrices", d.unwrap_or(0), d.unwrap_or(0))));
    }
    Ok(DenseMatrix::from_row_slice(side, &data))
}

pub fn matrices_to_json(ms: &[DenseMatrix]) -> Result<Value> {
    ms.iter().map(matrix_to_json).collect::<Result<Vec<_>>>().map(Value::Array)
}

/// Matrix-mode input `{"n": n, "d": d, "matrices": [...]}`.
pub fn matrix_input_from_json(v: &Value) -> Result<Vec<DenseMatrix>> {
    let d = v.get("d").map(|x| as_usize(x, "d")).transpose()?;
    let key = if v.get("matrices").is_some() { "matrices" } else { "system" };
    let ms = as_array(field(v, key)?, key)?
        .iter()
        .map(|m| matrix_from_json(m, d))
        .collect::<Result<Vec<_>>>()?;
    if let Some(n) = v.get("n") {
        if as_usize(n, "n")? != ms.len() {
            return Err(parse_err("\"n\" disagrees with the number of matrices"));
        }
    }
    let d0 = ms.first().map(DenseMatrix::d).ok_or_else(|| parse_err("no matrices given"))?;
    if ms.iter().any(|m| m.d() != d0) {
        return Err(parse_err("matrices of different sizes"));
    }
    Ok(ms)
}

pub fn matrix_input_to_json(ms: &[DenseMatrix]) -> Result<Value> {
    let mut o = Map::new();
    o.insert("n".into(), json!(ms.len()));
    o.insert("d".into(), json!(ms.first().map_or(0, DenseMatrix::d)));
    let flat = ms
        .iter()
        .map(|m| m.rows().concat().into_iter().map(float).collect::<Result<Vec<_>>>().map(Value::Array))
        .collect::<Result<Vec<_>>>()?;
    o.insert("matrices".into(), Value::Array(flat));
    Ok(Value::Object(o))
}

/// Formal-mode input `{"n", "degree", "perturbation": {"entries": [{"k", "r", "q", "c"}, ...]}}`:
/// `A_k = Q_k + Σ c·word` over the entries with output index `k`. Words must have degree ≥ 1.
pub fn formal_input_from_json(v: &Value) -> Result<Vec<FormalElement<Rational>>> {
    let n = as_usize(field(v, "n")?, "n")?;
    let cap = as_usize(field(v, "degree")?, "degree")?;
    if n == 0 {
        return Err(parse_err("n must be positive"));
    }
    let mut a = FormalElement::base_system(n, cap);
    let pert = field(v, "perturbation")?;
    let entries = pert.get("entries").unwrap_or(pert);
    for e in as_array(entries, "perturbation entries")? {
        let (key, c) = key_from_json(e, n, true)?;
        if key.k == 0 || key.k > n {
            return Err(parse_err(format!("output index k = {} out of range", key.k)));
        }
        if key.letters.is_empty() {
            return Err(parse_err("perturbation terms need degree ≥ 1"));
        }
        let w = Word { letters: key.letters, q: key.kappa };
        a[key.k - 1] = a[key.k - 1].add(&FormalElement::monomial(n, cap, w, c));
    }
    Ok(a)
}

pub fn is_formal_input(v: &Value) -> bool {
    v.get("perturbation").is_some()
}
