//! Grid-sampled functions, step functions, the convergence-in-measure metric
//! and trapezoid approximants of arc indicators.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::certificate::Certificate;
use crate::grid::{self, check_dyadic, circ_dist, node};
use crate::trigpoly::TrigPoly;
use crate::{Error, Result};

/// Complex samples at `t_j = 2 pi j / G`, `G` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_dyadic(values.len())?;
        Ok(SampledFunction { values })
    }

    pub fn from_fn(g: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_dyadic(g)?;
        Ok(SampledFunction {
            values: (0..g).map(|j| f(node(j, g))).collect(),
        })
    }

    pub fn zeros(g: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); g])
    }

    pub fn constant(g: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![c; g])
    }

    pub fn grid(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        SampledFunction {
            values: self.values.iter().enumerate().map(|(j, &v)| f(j, v)).collect(),
        }
    }

    /// Zero outside `mask`.
    pub fn restrict(&self, mask: &[bool]) -> Self {
        self.map(|j, v| if mask[j] { v } else { Complex64::new(0.0, 0.0) })
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid(), other.grid(), "grid mismatch");
        SampledFunction {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Add for &SampledFunction {
    type Output = SampledFunction;
    fn add(self, rhs: Self) -> SampledFunction {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &SampledFunction {
    type Output = SampledFunction;
    fn sub(self, rhs: Self) -> SampledFunction {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &SampledFunction {
    type Output = SampledFunction;
    fn mul(self, rhs: Self) -> SampledFunction {
        self.zip(rhs, |a, b| a * b)
    }
}

/// Normalised counting measure of a grid subset.
pub fn measure(mask: &[bool]) -> f64 {
    mask.iter().filter(|&&b| b).count() as f64 / mask.len() as f64
}

/// `inf { e : m{|f - g| > e} < e }` for the grid counting measure.
pub fn rho(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch(f.grid(), g.grid()));
    }
    let d: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| (a - b).norm()).collect();
    Ok(rho_of_moduli(d))
}

/// `rho(f 1_U, g 1_U)`.
pub fn rho_on(f: &SampledFunction, g: &SampledFunction, mask: &[bool]) -> Result<f64> {
    if f.grid() != g.grid() || mask.len() != f.grid() {
        return Err(Error::GridMismatch(f.grid(), g.grid()));
    }
    let d = f
        .values
        .iter()
        .zip(&g.values)
        .zip(mask)
        .map(|((a, b), &m)| if m { (a - b).norm() } else { 0.0 })
        .collect();
    Ok(rho_of_moduli(d))
}

/// The metric applied to a list of moduli `|f_j - g_j|`.
pub fn rho_of_moduli(mut d: Vec<f64>) -> f64 {
    let n = d.len();
    d.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let next = if k < n { d[k] } else { 0.0 };
        best = best.min(next.max(k as f64 / n as f64));
    }
    best
}

/// `m{|f| > eps}`.
pub fn measure_above(f: &SampledFunction, eps: f64) -> f64 {
    f.values.iter().filter(|v| v.norm() > eps).count() as f64 / f.grid() as f64
}

/// A closed-open arc `[start, start + length)` of the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleArc {
    pub start: f64,
    pub length: f64,
}

impl CircleArc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(0.0..=TAU).contains(&length) || !start.is_finite() {
            return Err(Error::InvalidParams(format!("arc start {start} length {length}")));
        }
        Ok(CircleArc {
            start: start.rem_euclid(TAU),
            length,
        })
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn contains(&self, t: f64) -> bool {
        (t - self.start).rem_euclid(TAU) < self.length
    }

    pub fn measure(&self) -> f64 {
        self.length / TAU
    }

    /// Circular distance from `t` to the closed arc.
    pub fn distance(&self, t: f64) -> f64 {
        if self.contains(t) {
            0.0
        } else {
            circ_dist(t, self.start).min(circ_dist(t, self.end()))
        }
    }

    /// Grid nodes inside the arc, decided on integer node indices.
    pub fn mask(&self, g: usize) -> Vec<bool> {
        let (lo, hi) = node_range(self.start, self.end(), g);
        let mut m = vec![false; g];
        for j in lo..hi {
            m[j.rem_euclid(g as i64) as usize] = true;
        }
        m
    }

    /// Grid nodes at distance greater than `delta` from the arc.
    pub fn outside_neighbourhood(&self, delta: f64, g: usize) -> Vec<bool> {
        (0..g).map(|j| self.distance(node(j, g)) > delta).collect()
    }

    pub fn indicator(&self, g: usize) -> Result<SampledFunction> {
        let m = self.mask(g);
        SampledFunction::new(m.iter().map(|&b| Complex64::new(b as u8 as f64, 0.0)).collect())
    }
}

/// Node indices `j` (possibly beyond `g`) with `a <= t_j < b`, tolerant to rounding.
fn node_range(a: f64, b: f64, g: usize) -> (i64, i64) {
    let scale = g as f64 / TAU;
    let lo = (a * scale - 1e-9).ceil() as i64;
    let hi = (b * scale - 1e-9).ceil() as i64;
    (lo, hi.max(lo))
}

/// Piecewise-constant function on arcs `[b_i, b_{i+1})`, the last arc wrapping to `b_0 + 2 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidParams("step function needs one value per arc".into()));
        }
        let ok = breakpoints.windows(2).all(|w| w[0] < w[1])
            && breakpoints[0] >= 0.0
            && *breakpoints.last().unwrap() < TAU;
        if !ok {
            return Err(Error::InvalidParams(
                "breakpoints must increase strictly inside [0, 2pi)".into(),
            ));
        }
        Ok(StepFunction { breakpoints, values })
    }

    pub fn constant(c: Complex64) -> Self {
        StepFunction {
            breakpoints: vec![0.0],
            values: vec![c],
        }
    }

    /// `K` equal arcs starting at 0.
    pub fn equal_arcs(values: Vec<Complex64>) -> Result<Self> {
        let k = values.len();
        Self::new((0..k).map(|i| TAU * i as f64 / k as f64).collect(), values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(arc, value)` pairs.
    pub fn arcs(&self) -> impl Iterator<Item = (CircleArc, Complex64)> + '_ {
        let k = self.len();
        (0..k).map(move |i| {
            let a = self.breakpoints[i];
            let b = if i + 1 < k { self.breakpoints[i + 1] } else { self.breakpoints[0] + TAU };
            (CircleArc { start: a, length: b - a }, self.values[i])
        })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let t = t.rem_euclid(TAU);
        match self.breakpoints.partition_point(|&b| b <= t) {
            0 => *self.values.last().unwrap(),
            i => self.values[i - 1],
        }
    }

    pub fn sample(&self, g: usize) -> Result<SampledFunction> {
        check_dyadic(g)?;
        let mut v = vec![Complex64::new(0.0, 0.0); g];
        for (arc, c) in self.arcs() {
            let (lo, hi) = node_range(arc.start, arc.end(), g);
            for j in lo..hi {
                v[j.rem_euclid(g as i64) as usize] = c;
            }
        }
        SampledFunction::new(v)
    }

    /// Exact Fourier coefficient `(1/2pi) int S(t) e^{-int} dt`.
    pub fn fourier(&self, n: i64) -> Complex64 {
        self.arcs().map(|(a, c)| c * arc_fourier(&a, n)).sum()
    }

    /// Merges adjacent arcs with equal values.
    pub fn simplify(&self) -> Self {
        let k = self.len();
        if k == 1 {
            return self.clone();
        }
        let keep: Vec<usize> = (0..k).filter(|&i| self.values[i] != self.values[(i + k - 1) % k]).collect();
        if keep.is_empty() {
            return StepFunction::constant(self.values[0]);
        }
        StepFunction {
            breakpoints: keep.iter().map(|&i| self.breakpoints[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Fourier coefficient of the indicator of an arc.
pub fn arc_fourier(arc: &CircleArc, n: i64) -> Complex64 {
    if n == 0 {
        return Complex64::new(arc.length / TAU, 0.0);
    }
    let nf = n as f64;
    let e = |t: f64| Complex64::from_polar(1.0, -nf * t);
    (e(arc.start) - e(arc.end())) / Complex64::new(0.0, TAU * nf)
}

/// Step function on `K` equal arcs (each valued at the node nearest its midpoint),
/// with `K` doubled until `rho(S, f) < target`.
pub fn step_approximate(f: &SampledFunction, target: f64) -> Result<StepFunction> {
    if !(target > 0.0) {
        return Err(Error::InvalidParams(format!("target {target} must be positive")));
    }
    let g = f.grid();
    let max_arcs = g / 4;
    let mut k = 1;
    while k <= max_arcs {
        let vals = (0..k)
            .map(|i| {
                let mid = ((2 * i + 1) * g) as f64 / (2 * k) as f64;
                f.values[(mid.round() as usize) % g]
            })
            .collect();
        let s = StepFunction::equal_arcs(vals)?;
        if rho(&s.sample(g)?, f)? < target {
            return Ok(s.simplify());
        }
        k *= 2;
    }
    Err(Error::TargetUnreachable { target, max_arcs })
}

/// Fourier coefficients of the trapezoid `1_I * (1/w) 1_[-w/2, w/2]`.
pub fn trapezoid_coeff(arc: &CircleArc, w: f64, n: i64) -> Complex64 {
    if n == 0 {
        return arc_fourier(arc, 0);
    }
    let x = n as f64 * w / 2.0;
    arc_fourier(arc, n) * (x.sin() / x)
}

/// `sum_{|n| > N} |T^(n)| <= 4 / (pi w N)` for the trapezoid of ramp width `w`.
pub fn trapezoid_tail_bound(w: f64, n: u64) -> f64 {
    4.0 / (PI * w * n as f64)
}

/// Symmetric partial Fourier sum of order `n` of the trapezoid.
pub fn trapezoid_partial_sum(arc: &CircleArc, w: f64, n: u64) -> TrigPoly {
    let n = n as i64;
    TrigPoly::from_terms((-n..=n).map(|k| (k, trapezoid_coeff(arc, w, k))))
}

/// Result of [`trapezoid_indicator`], with the geometry that produced it.
#[derive(Debug, Clone)]
pub struct Trapezoid {
    pub poly: TrigPoly,
    pub ramp: f64,
    pub order: u64,
    pub certificate: Certificate,
}

/// Ramp width used by [`trapezoid_indicator`]: total width `delta / 4`, centred on each endpoint.
pub fn default_ramp(delta: f64) -> f64 {
    delta / 4.0
}

/// Partial Fourier sum `g` of a trapezoid interpolating `1_I`, of the smallest dyadic
/// order whose tail is below `delta/6` and which meets the clauses
/// `|g| < delta / (2 hstar_bound)` off `I_delta`, `rho(g, 1_I) < delta/3` and
/// `||g*|| < 6/delta` on a check grid.
pub fn trapezoid_indicator(arc: &CircleArc, delta: f64, hstar_bound: f64) -> Result<Trapezoid> {
    trapezoid_with(arc, delta, hstar_bound, default_ramp(delta), 1 << 20)
}

pub fn trapezoid_with(
    arc: &CircleArc,
    delta: f64,
    hstar_bound: f64,
    ramp: f64,
    max_order: u64,
) -> Result<Trapezoid> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta {delta} outside (0, 1)")));
    }
    let off_bound = delta / (2.0 * hstar_bound.max(1e-300));
    if arc.length == 0.0 {
        let mut cert = Certificate::new(8, 0.0);
        cert.lt("off_neighbourhood_modulus", off_bound, 0.0)
            .lt("rho_to_indicator", delta / 3.0, 0.0)
            .lt("maximal_sup", 6.0 / delta, 0.0)
            .lt("tail_bound", delta / 6.0, 0.0);
        return Ok(Trapezoid {
            poly: TrigPoly::zero(),
            ramp,
            order: 0,
            certificate: cert,
        });
    }
    if arc.length + ramp >= TAU {
        return Err(Error::InfeasibleRamp { length: arc.length });
    }
    let mut order = 16u64;
    while trapezoid_tail_bound(ramp, order) >= delta / 6.0 {
        order *= 2;
    }
    loop {
        let poly = trapezoid_partial_sum(arc, ramp, order);
        let g = grid::dyadic_at_least(4 * order).max(4096);
        let vals = poly.sample(g);
        let outside = arc.outside_neighbourhood(delta, g);
        let off = vals
            .values()
            .iter()
            .zip(&outside)
            .filter(|(_, &o)| o)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max);
        let rho_i = rho(&vals, &arc.indicator(g)?)?;
        if (off < off_bound && rho_i < delta / 3.0) || order >= max_order {
            let l1 = poly.coeff_l1();
            let gstar = if l1 < 6.0 / delta {
                l1
            } else {
                poly.maximal_on_grid(grid::dyadic_at_least(2 * order + 2)).sup()
            };
            let mut cert = Certificate::new(g, 0.0);
            cert.lt("off_neighbourhood_modulus", off_bound, off)
                .lt("rho_to_indicator", delta / 3.0, rho_i)
                .lt("maximal_sup", 6.0 / delta, gstar)
                .lt("tail_bound", delta / 6.0, trapezoid_tail_bound(ramp, order));
            return Ok(Trapezoid {
                poly,
                ramp,
                order,
                certificate: cert,
            });
        }
        order *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rho_closed_forms() {
        let g = 1024;
        let z = SampledFunction::zeros(g).unwrap();
        assert_eq!(rho(&z, &z).unwrap(), 0.0);
        let k = SampledFunction::constant(g, c(0.3)).unwrap();
        assert!((rho(&k, &z).unwrap() - 0.3).abs() <= 2.0 / g as f64);
        let tenth = SampledFunction::from_fn(g, |t| c((t < 0.1 * TAU) as u8 as f64)).unwrap();
        assert!((rho(&tenth, &z).unwrap() - 0.1).abs() <= 2.0 / g as f64);
    }

    #[test]
    fn measure_of_chord_length() {
        let g = 4096;
        let f = SampledFunction::from_fn(g, |t| c(2.0 * (t / 2.0).sin().abs())).unwrap();
        assert!((measure_above(&f, 1.0) - 2.0 / 3.0).abs() <= 2.0 / g as f64);
        assert_eq!(measure_above(&SampledFunction::zeros(8).unwrap(), 0.0), 0.0);
    }

    #[test]
    fn step_sampling_and_eval_agree() {
        let s = StepFunction::new(vec![0.5, 2.0, 4.0], vec![c(1.0), c(-2.0), c(3.0)]).unwrap();
        let g = 256;
        let v = s.sample(g).unwrap();
        for j in 0..g {
            assert_eq!(v.values()[j], s.eval(node(j, g)), "node {j}");
        }
    }

    #[test]
    fn step_fourier_matches_quadrature() {
        let s = StepFunction::new(vec![0.0, 1.0, 3.5], vec![c(1.0), Complex64::new(0.0, 2.0), c(-1.0)]).unwrap();
        let g = 1 << 16;
        let v = s.sample(g).unwrap();
        for n in [-3i64, 0, 2, 7] {
            let q: Complex64 = v
                .values()
                .iter()
                .enumerate()
                .map(|(j, x)| x * Complex64::from_polar(1.0, -(n as f64) * node(j, g)))
                .sum::<Complex64>()
                / g as f64;
            assert!((q - s.fourier(n)).norm() < 1e-3, "n = {n}");
        }
    }

    #[test]
    fn step_approximation_reproduces_steps() {
        let g = 256;
        let f = SampledFunction::from_fn(g, |t| c((t < PI) as u8 as f64)).unwrap();
        let s = step_approximate(&f, 0.1).unwrap();
        assert_eq!(rho(&s.sample(g).unwrap(), &f).unwrap(), 0.0);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn simplify_merges_wrapping_runs() {
        let s = StepFunction::equal_arcs(vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap().simplify();
        assert_eq!(s.len(), 2);
        assert_eq!(s.eval(0.1), c(1.0));
        assert_eq!(s.eval(TAU - 0.1), c(1.0));
        assert_eq!(s.eval(PI), c(0.0));
    }

    #[test]
    fn trapezoid_is_difference_of_positive_triangles() {
        let arc = CircleArc::new(0.4, PI / 2.0).unwrap();
        let (l, w) = (arc.length, 0.0625);
        let centre = arc.start + l / 2.0;
        let tri = |half: f64, peak: f64, n: f64| {
            let s = 2.0 * (n * half / 2.0).sin() / n;
            peak / (TAU * half) * s * s
        };
        let (ha, pa) = ((l + w) / 2.0, (l + w) / (2.0 * w));
        let (hb, pb) = ((l - w) / 2.0, (l - w) / (2.0 * w));
        assert!((pa - pb - 1.0).abs() < 1e-12);
        for n in 1..400i64 {
            let nf = n as f64;
            let (a, b) = (tri(ha, pa, nf), tri(hb, pb, nf));
            assert!(a >= 0.0 && b >= 0.0);
            let t = Complex64::from_polar(1.0, -nf * centre) * (a - b);
            assert!((t - trapezoid_coeff(&arc, w, n)).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn empty_arc_gives_zero() {
        let t = trapezoid_indicator(&CircleArc::new(1.0, 0.0).unwrap(), 0.3, 1.0).unwrap();
        assert!(t.poly.is_zero());
        assert!(t.certificate.passed());
    }
}
