//! Text formats for signals, coefficient arrays, parameters and point sets.
//!
//! - Signals: JSON nested by axis (`d = 1` is a flat list) of `[re, im]`
//!   pairs; CSV with header `index,re,im`.
//! - DGT coefficients: JSON `[[[re, im]; N^d]; N^d]` indexed `[k][l]`;
//!   CSV `k,l,re,im` with flat indices.
//! - Points: JSON rows `[k₁..k_d, l₁..l_d]`, i.e. `[[k, l], …]` for `d = 1`.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::frames::{PointSet, Sample};
use crate::index::IndexSpace;
use crate::lattice::{GaborParams, C64};
use crate::transforms::{DGTCoefficients, Signal};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))
}

pub fn params_from_json(text: &str) -> Result<GaborParams> {
    let file = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("params: {e}")))?;
    GaborParams::from_file(&file)
}

pub fn load_params(path: &Path) -> Result<GaborParams> {
    params_from_json(&read(path)?)
}

pub fn params_to_json(params: &GaborParams) -> String {
    serde_json::to_string_pretty(&params.to_file()).expect("params serialize")
}

fn pair(v: &Value) -> Option<C64> {
    match v.as_array()?.as_slice() {
        [re, im] => Some(C64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

/// Flatten nested arrays whose leaves are `[re, im]` pairs, row-major.
fn flatten_pairs(v: &Value, out: &mut Vec<C64>) -> Result<()> {
    if let Some(c) = pair(v) {
        out.push(c);
        return Ok(());
    }
    match v.as_array() {
        Some(items) => items.iter().try_for_each(|it| flatten_pairs(it, out)),
        None => Err(Error::Invalid(format!("expected an array of [re, im] pairs, found {v}"))),
    }
}

fn pair_value(c: C64) -> Value {
    Value::from(vec![c.re, c.im])
}

fn nest(values: &[C64], n: usize, depth: usize) -> Value {
    if depth <= 1 {
        return Value::Array(values.iter().map(|&c| pair_value(c)).collect());
    }
    let stride = values.len() / n;
    Value::Array(values.chunks(stride).map(|ch| nest(ch, n, depth - 1)).collect())
}

pub fn signal_from_json(text: &str, n: usize, d: usize) -> Result<Signal> {
    let mut out = Vec::new();
    flatten_pairs(&json(text)?, &mut out)?;
    Signal::new(n, d, out)
}

pub fn signal_to_json(s: &Signal) -> String {
    serde_json::to_string(&nest(s.coeffs(), s.n(), s.d())).expect("signal serialize")
}

fn parse_csv_rows(text: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(Error::Invalid(format!("line {}: expected {width} fields, got {}", lineno + 1, fields.len())));
        }
        match fields.iter().map(|f| f.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>() {
            Ok(r) => rows.push(r),
            Err(_) if rows.is_empty() && lineno == 0 => continue,
            Err(e) => return Err(Error::Invalid(format!("line {}: {e}", lineno + 1))),
        }
    }
    Ok(rows)
}

fn index_field(v: f64, len: usize, what: &str) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 || v as usize >= len {
        return Err(Error::Invalid(format!("{what} {v} is not an integer in [0, {len})")));
    }
    Ok(v as usize)
}

pub fn signal_from_csv(text: &str, n: usize, d: usize) -> Result<Signal> {
    let len = IndexSpace::new(n, d).len();
    let rows = parse_csv_rows(text, 3)?;
    if rows.len() != len {
        return Err(Error::ShapeMismatch { expected: len, got: rows.len() });
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); len];
    for r in rows {
        coeffs[index_field(r[0], len, "index")?] = C64::new(r[1], r[2]);
    }
    Signal::new(n, d, coeffs)
}

pub fn signal_to_csv(s: &Signal) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, c) in s.coeffs().iter().enumerate() {
        writeln!(out, "{i},{:?},{:?}", c.re, c.im).unwrap();
    }
    out
}

pub fn coefficients_from_json(text: &str, n: usize, d: usize) -> Result<DGTCoefficients> {
    let mut out = Vec::new();
    flatten_pairs(&json(text)?, &mut out)?;
    DGTCoefficients::new(n, d, out)
}

pub fn coefficients_to_json(c: &DGTCoefficients) -> String {
    let len = c.space().len();
    let rows: Vec<Value> = c.values().chunks(len).map(|r| nest(r, len, 1)).collect();
    serde_json::to_string(&Value::Array(rows)).expect("coefficients serialize")
}

pub fn coefficients_from_csv(text: &str, n: usize, d: usize) -> Result<DGTCoefficients> {
    let len = IndexSpace::new(n, d).len();
    let rows = parse_csv_rows(text, 4)?;
    if rows.len() != len * len {
        return Err(Error::ShapeMismatch { expected: len * len, got: rows.len() });
    }
    let mut values = vec![C64::new(0.0, 0.0); len * len];
    for r in rows {
        let k = index_field(r[0], len, "k")?;
        let l = index_field(r[1], len, "l")?;
        values[k * len + l] = C64::new(r[2], r[3]);
    }
    DGTCoefficients::new(n, d, values)
}

pub fn coefficients_to_csv(c: &DGTCoefficients) -> String {
    let len = c.space().len();
    let mut out = String::from("k,l,re,im\n");
    for (i, v) in c.values().iter().enumerate() {
        writeln!(out, "{},{},{:?},{:?}", i / len, i % len, v.re, v.im).unwrap();
    }
    out
}

pub fn points_from_json(text: &str, params: &GaborParams) -> Result<PointSet> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("points: {e}")))?;
    let d = params.d();
    let mut samples = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        if r.len() != 2 * d {
            return Err(Error::InvalidDimension(format!("point {j} has {} entries, expected {}", r.len(), 2 * d)));
        }
        if r.iter().any(|&v| v < 0) {
            return Err(Error::SampleOutOfRange(format!("point {j} = {r:?} has a negative index")));
        }
        let u: Vec<usize> = r.iter().map(|&v| v as usize).collect();
        samples.push(Sample { k: u[..d].to_vec(), l: u[d..].to_vec() });
    }
    if samples.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    PointSet::new(samples, params)
}

pub fn load_points(path: &Path, params: &GaborParams) -> Result<PointSet> {
    points_from_json(&read(path)?, params)
}

pub fn points_to_json(points: &PointSet) -> String {
    let rows: Vec<Vec<usize>> = points.samples.iter().map(|s| s.k.iter().chain(&s.l).cloned().collect()).collect();
    serde_json::to_string(&rows).expect("points serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_signal(n: usize, d: usize) -> Signal {
        let len = n.pow(d as u32);
        Signal::new(n, d, (0..len).map(|i| C64::new(i as f64 * 0.1, 1.0 / (i as f64 + 3.0))).collect()).unwrap()
    }

    #[test]
    fn signal_round_trips() {
        for (n, d) in [(5, 1), (3, 2)] {
            let s = sample_signal(n, d);
            assert_eq!(signal_from_json(&signal_to_json(&s), n, d).unwrap(), s);
            assert_eq!(signal_from_csv(&signal_to_csv(&s), n, d).unwrap(), s);
        }
        assert!(signal_to_json(&sample_signal(2, 2)).starts_with("[[["));
    }

    #[test]
    fn wrong_length_is_reported() {
        let err = signal_from_json("[[1,0],[0,1]]", 3, 1).unwrap_err();
        assert_eq!(err, Error::ShapeMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn coefficients_round_trip() {
        let vals: Vec<C64> = (0..16).map(|i| C64::new(i as f64, -(i as f64) / 7.0)).collect();
        let c = DGTCoefficients::new(2, 2, vals.clone()).unwrap();
        let back = coefficients_from_json(&coefficients_to_json(&c), 2, 2).unwrap();
        assert_eq!(back.values(), &vals[..]);
        let back = coefficients_from_csv(&coefficients_to_csv(&c), 2, 2).unwrap();
        assert_eq!(back.values(), &vals[..]);
    }

    #[test]
    fn points_parse() {
        let p = GaborParams::one_dim(4, 0.0, 1.0).unwrap();
        let pts = points_from_json("[[0,0],[1,2],[3,3]]", &p).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(points_to_json(&pts), "[[0,0],[1,2],[3,3]]");
        assert!(matches!(points_from_json("[[0,4]]", &p), Err(Error::SampleOutOfRange(_))));
        assert!(matches!(points_from_json("[[0,1,2]]", &p), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn params_round_trip() {
        let p = GaborParams::one_dim(3, 0.25, 1.5).unwrap();
        assert_eq!(params_from_json(&params_to_json(&p)).unwrap(), p);
    }
}
