//! Deterministic JSON: floats with 17 significant digits, complex numbers as [re, im].

use std::io;

use nalgebra::DMatrix;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::liealg::{Algebra, Element};
use crate::scalar::{Field, C64, CQ, Q};

pub const SCHEMA: &str = "mscasimir/1";

struct Fmt17<'a>(PrettyFormatter<'a>);

impl Formatter for Fmt17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{}", fmt_f64(v))
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{}", fmt_f64(v as f64))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// 17 significant digits in exponent form; −0 prints as 0.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.0000000000000000e0".into();
    }
    format!("{v:.16e}")
}

/// Pretty-printed, key-sorted, byte-stable rendering.
pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fmt17(PrettyFormatter::with_indent(b"  ")));
    v.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("utf8")
}

/// Wraps a payload with the schema tag and resolved config.
pub fn envelope(kind: &str, config: Value, payload: Value) -> Value {
    json!({"schema": SCHEMA, "kind": kind, "config": config, "result": payload})
}

pub fn f(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn c64(z: C64) -> Value {
    Value::Array(vec![f(z.re), f(z.im)])
}

pub fn c64_vec(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| c64(*z)).collect())
}

pub fn cmat(m: &DMatrix<C64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| c64(m[(i, j)])).collect())).collect())
}

pub fn rmat(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| f(m[(i, j)])).collect())).collect())
}

pub fn rational(x: &Q) -> Value {
    Value::String(x.to_string())
}

pub fn cq(z: &CQ) -> Value {
    Value::Array(vec![rational(&z.re), rational(&z.im)])
}

pub fn cqmat(m: &DMatrix<CQ>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| cq(&m[(i, j)])).collect())).collect())
}

/// Nonzero coefficients keyed by basis label.
pub fn element_q(alg: &Algebra, x: &Element<Q>) -> Value {
    let mut map = serde_json::Map::new();
    for (a, v) in x.coeffs.iter().enumerate() {
        if !num_traits::Zero::is_zero(v) {
            map.insert(alg.label(a), rational(v));
        }
    }
    Value::Object(map)
}

pub fn element_c64(alg: &Algebra, x: &Element<C64>, tol: f64) -> Value {
    let mut map = serde_json::Map::new();
    for (a, v) in x.coeffs.iter().enumerate() {
        if v.mag() > tol {
            map.insert(alg.label(a), c64(*v));
        }
    }
    Value::Object(map)
}

pub fn ser_c64<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

pub fn ser_c64_vec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Parse a real or complex matrix given as rows of numbers or [re, im] pairs.
pub fn parse_cmat(v: &Value) -> Option<DMatrix<C64>> {
    let rows = v.as_array()?;
    let n = rows.len();
    let m = rows.first().map(|r| r.as_array().map(|a| a.len()).unwrap_or(0)).unwrap_or(0);
    let mut out = DMatrix::<C64>::zeros(n, m);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array()?;
        if r.len() != m {
            return None;
        }
        for (j, e) in r.iter().enumerate() {
            out[(i, j)] = match e {
                Value::Number(x) => C64::new(x.as_f64()?, 0.0),
                Value::Array(p) if p.len() == 2 => C64::new(p[0].as_f64()?, p[1].as_f64()?),
                _ => return None,
            };
        }
    }
    Some(out)
}
