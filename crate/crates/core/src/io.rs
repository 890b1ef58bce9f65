//! Plain-text artifact formats.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the values bit for bit.

use std::fmt::Write;

use num_complex::Complex64;

use crate::sampling::{SampledFunction, StepFunction};
use crate::trigpoly::{SpecialProduct, TrigPoly};
use crate::{Error, Result};

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad number {s:?}")))
}

fn fields(line: &str, count: usize, lineno: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() != count {
        return Err(Error::Parse(format!("line {lineno}: expected {count} fields, got {}", f.len())));
    }
    Ok(f)
}

/// Data lines with their 1-based numbers, skipping blanks, comments and the header.
fn rows<'a>(text: &'a str, header: &'a str) -> impl Iterator<Item = (usize, &'a str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !l.starts_with('#') && *l != header)
}

/// Coefficient table with header `n,re,im`.
pub fn write_coeffs(p: &TrigPoly) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, c) in p.terms() {
        writeln!(out, "{n},{:e},{:e}", c.re, c.im).unwrap();
    }
    out
}

pub fn read_coeffs(text: &str) -> Result<TrigPoly> {
    let mut terms = Vec::new();
    for (no, line) in rows(text, "n,re,im") {
        let f = fields(line, 3, no)?;
        let n: i64 = f[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {no}: bad frequency {:?}", f[0])))?;
        terms.push((n, Complex64::new(parse_f64(f[1], no)?, parse_f64(f[2], no)?)));
    }
    TrigPoly::from_unique_terms(terms)
}

/// Grid samples with header `j,re,im`, one row per node in order.
pub fn write_samples(f: &SampledFunction) -> String {
    let mut out = String::from("j,re,im\n");
    for (j, v) in f.values().iter().enumerate() {
        writeln!(out, "{j},{:e},{:e}", v.re, v.im).unwrap();
    }
    out
}

pub fn read_samples(text: &str) -> Result<SampledFunction> {
    let mut values = Vec::new();
    for (no, line) in rows(text, "j,re,im") {
        let f = fields(line, 3, no)?;
        if f[0] != values.len().to_string() {
            return Err(Error::Parse(format!("line {no}: expected node {}", values.len())));
        }
        values.push(Complex64::new(parse_f64(f[1], no)?, parse_f64(f[2], no)?));
    }
    SampledFunction::new(values)
}

/// Step function with header `start,re,im`: value on `[start_i, start_{i+1})`.
pub fn write_step(s: &StepFunction) -> String {
    let mut out = String::from("start,re,im\n");
    for (arc, v) in s.arcs() {
        writeln!(out, "{:e},{:e},{:e}", arc.start, v.re, v.im).unwrap();
    }
    out
}

pub fn read_step(text: &str) -> Result<StepFunction> {
    let (mut bps, mut vals) = (Vec::new(), Vec::new());
    for (no, line) in rows(text, "start,re,im") {
        let f = fields(line, 3, no)?;
        bps.push(parse_f64(f[0], no)?);
        vals.push(Complex64::new(parse_f64(f[1], no)?, parse_f64(f[2], no)?));
    }
    if bps.is_empty() {
        return Err(Error::Parse("empty step function".into()));
    }
    StepFunction::new(bps, vals)
}

/// Factored product `g . h_[r]`: a `# r` line, then rows `part,n,re,im`.
pub fn write_product(sp: &SpecialProduct) -> String {
    let mut out = format!("# r {}\npart,n,re,im\n", sp.r);
    for (part, p) in [("g", &sp.g), ("h", &sp.h)] {
        for (n, c) in p.terms() {
            writeln!(out, "{part},{n},{:e},{:e}", c.re, c.im).unwrap();
        }
    }
    out
}

pub fn read_product(text: &str) -> Result<SpecialProduct> {
    let r = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("# r "))
        .ok_or_else(|| Error::Parse("missing '# r' line".into()))?
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::Parse("bad dilation".into()))?;
    let (mut g, mut h) = (Vec::new(), Vec::new());
    for (no, line) in rows(text, "part,n,re,im") {
        let f = fields(line, 4, no)?;
        let n: i64 = f[1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {no}: bad frequency {:?}", f[1])))?;
        let c = Complex64::new(parse_f64(f[2], no)?, parse_f64(f[3], no)?);
        match f[0] {
            "g" => g.push((n, c)),
            "h" => h.push((n, c)),
            other => return Err(Error::Parse(format!("line {no}: unknown part {other:?}"))),
        }
    }
    let (g, h) = (TrigPoly::from_unique_terms(g)?, TrigPoly::from_unique_terms(h)?);
    if h == TrigPoly::one() {
        // Plain polynomials carry any dilation; skip the size check.
        return Ok(SpecialProduct { g, h, r });
    }
    SpecialProduct::new(g, h, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_round_trip_is_exact() {
        let p = TrigPoly::from_terms([(-3, Complex64::new(0.1, -1e-300)), (7, Complex64::new(1.0 / 3.0, 2.5))]);
        assert_eq!(read_coeffs(&write_coeffs(&p)).unwrap(), p);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(read_coeffs("n,re,im\n1,0,1\n1,2,0\n").is_err());
        assert!(read_coeffs("n,re,im\n1,0\n").is_err());
    }

    #[test]
    fn samples_steps_and_products_round_trip() {
        let f = SampledFunction::from_fn(16, |t| Complex64::new(t.sin(), t)).unwrap();
        assert_eq!(read_samples(&write_samples(&f)).unwrap(), f);
        let s = StepFunction::new(vec![0.5, 2.0, 4.0], vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::default()]).unwrap();
        assert_eq!(read_step(&write_step(&s)).unwrap(), s);
        let sp = SpecialProduct::new(
            TrigPoly::from_terms([(-1, Complex64::new(0.5, 0.0)), (1, Complex64::new(0.5, 0.0))]),
            TrigPoly::from_terms([(1, Complex64::new(0.2, 0.1)), (3, Complex64::new(-0.4, 0.0))]),
            5,
        )
        .unwrap();
        let back = read_product(&write_product(&sp)).unwrap();
        assert_eq!((back.g, back.h, back.r), (sp.g, sp.h, sp.r));
    }
}
