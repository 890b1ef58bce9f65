//! Sparse trigonometric polynomials and their maximal partial-sum function.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::certificate::Certificate;
use crate::geometry::diameter;
use crate::grid::{self, check_dyadic, dyadic_at_least, twiddles};
use crate::sampling::SampledFunction;
use crate::{Error, Result};

/// `P(t) = sum c(n) e^{int}` with only nonzero coefficients stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(n: i64, c: Complex64) -> Self {
        Self::from_terms([(n, c)])
    }

    /// Sums repeated frequencies and drops exact zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, c) in terms {
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        TrigPoly { coeffs }
    }

    /// Like [`from_terms`](Self::from_terms) but rejects repeated frequencies.
    pub fn from_unique_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, c) in terms {
            if coeffs.insert(n, c).is_some() {
                return Err(Error::Parse(format!("duplicate frequency {n}")));
            }
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(TrigPoly { coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn lo(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn hi(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn degree(&self) -> u64 {
        match (self.lo(), self.hi()) {
            (Some(lo), Some(hi)) => lo.unsigned_abs().max(hi.unsigned_abs()),
            _ => 0,
        }
    }

    /// Frequencies with nonzero coefficient, increasing.
    pub fn spec(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms().map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * t)).sum()
    }

    /// Grid values by FFT; requires `G >= 2 deg + 2`.
    pub fn eval_grid(&self, g: usize) -> Result<SampledFunction> {
        check_dyadic(g)?;
        if (g as u64) < 2 * self.degree() + 2 {
            return Err(Error::GridTooCoarse {
                grid: g,
                degree: self.degree(),
            });
        }
        Ok(self.sample(g))
    }

    /// Exact grid values for any degree, by folding frequencies modulo `G`.
    pub fn sample(&self, g: usize) -> SampledFunction {
        SampledFunction::new(grid::sample_terms(self.coeffs.iter(), g)).expect("dyadic grid")
    }

    /// `P_[r](t) = P(rt)`.
    pub fn dilate(&self, r: u64) -> TrigPoly {
        let r = r as i64;
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(&n, &c)| (n * r, c)).collect(),
        }
    }

    pub fn multiply(&self, other: &TrigPoly) -> TrigPoly {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&n, &a) in &self.coeffs {
            for (&m, &b) in &other.coeffs {
                *out.entry(n + m).or_default() += a * b;
            }
        }
        out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        TrigPoly { coeffs: out }
    }

    pub fn scale(&self, s: Complex64) -> TrigPoly {
        TrigPoly::from_terms(self.terms().map(|(n, c)| (n, c * s)))
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        TrigPoly::from_terms(self.terms().chain(other.terms()))
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        TrigPoly::from_terms(self.terms().chain(other.terms().map(|(n, c)| (n, -c))))
    }

    /// Keeps the frequencies for which `keep` holds.
    pub fn filter(&self, keep: impl Fn(i64) -> bool) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().filter(|(n, _)| keep(**n)).map(|(&n, &c)| (n, c)).collect(),
        }
    }

    /// `max |c(n)|`.
    pub fn coeff_sup(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `(sum |c(n)|^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Grid maximum of `|P|` with 8x degree oversampling.
    pub fn sup_norm(&self) -> f64 {
        self.sample(oversampled_grid(self.degree())).sup()
    }

    /// `P*` on the grid; requires `G >= 2 deg + 2`.
    pub fn maximal(&self, g: usize) -> Result<SampledFunction> {
        self.eval_grid(g)?;
        Ok(self.maximal_on_grid(g))
    }

    /// `P*(t_j) = max_{l <= m} |sum_{n=l}^{m} c(n) e^{i n t_j}|` at every node of a dyadic grid,
    /// as the diameter of the prefix-sum set `{0, A_lo, ..., A_hi}`.
    pub fn maximal_on_grid(&self, g: usize) -> SampledFunction {
        self.maximal_with(g, None, diameter)
    }

    /// Same as [`maximal_on_grid`](Self::maximal_on_grid) by scanning all segments.
    pub fn maximal_scan(&self, g: usize) -> SampledFunction {
        self.maximal_with(g, None, |pts| {
            let mut best = 0.0f64;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let (dx, dy) = (pts[j].0 - pts[i].0, pts[j].1 - pts[i].1);
                    best = best.max(dx.hypot(dy));
                }
            }
            best
        })
    }

    /// `P*` only at the nodes where `mask` holds; zero elsewhere.
    pub fn maximal_on_nodes(&self, g: usize, mask: &[bool]) -> SampledFunction {
        self.maximal_with(g, Some(mask), diameter)
    }

    /// `max_j P*(t_j)` over a dyadic grid; equal to `maximal_on_grid(g).sup()`.
    ///
    /// A first pass bounds each node's diameter by the widths of its prefix
    /// sums along four directions; exact diameters are then taken only at
    /// nodes whose upper bound can still beat the best value found.
    pub fn maximal_sup(&self, g: usize) -> f64 {
        let f = Folded::new(self, g);
        if f.terms.is_empty() {
            return 0.0;
        }
        // The diameter direction lies within pi/8 of a sampled one; the extra
        // factor is a margin for rounding.
        let widen = (1.0 + 1e-8) / (std::f64::consts::PI / 8.0).cos();
        let mut bounds: Vec<(f64, usize)> = Vec::with_capacity(g);
        for base in (0..g).step_by(LANES) {
            let widths = width_bounds_dispatch(&f, base);
            bounds.extend((base..g.min(base + LANES)).map(|j| (widths[j - base], j)));
        }
        let floor = bounds.iter().map(|b| b.0).fold(0.0, f64::max) / widen;
        bounds.retain(|b| b.0 >= floor);
        bounds.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best = 0.0f64;
        let mut pts = Vec::with_capacity(f.terms.len() + 1);
        for &(width, j) in &bounds {
            if width * widen < best {
                break;
            }
            f.prefix_points(j, &mut pts);
            best = best.max(diameter(&mut pts));
        }
        best
    }

    fn maximal_with(
        &self,
        g: usize,
        nodes: Option<&[bool]>,
        diam: impl Fn(&mut Vec<(f64, f64)>) -> f64,
    ) -> SampledFunction {
        let f = Folded::new(self, g);
        let mut pts = Vec::with_capacity(f.terms.len() + 1);
        let vals = (0..g)
            .map(|j| {
                if nodes.is_some_and(|m| !m[j]) {
                    return Complex64::default();
                }
                f.prefix_points(j, &mut pts);
                Complex64::new(diam(&mut pts), 0.0)
            })
            .collect();
        SampledFunction::new(vals).expect("dyadic grid")
    }

    /// `P*(t)` at one angle.
    pub fn maximal_at(&self, t: f64) -> f64 {
        let mut pts = vec![(0.0, 0.0)];
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in self.terms() {
            acc += c * Complex64::from_polar(1.0, n as f64 * t);
            pts.push((acc.re, acc.im));
        }
        diameter(&mut pts)
    }

    /// `sup_N || sum_{|n| <= N} c(n) e^{int} ||_inf`, sup norms on the 8x oversampled grid.
    pub fn u_norm(&self) -> f64 {
        let d = self.degree();
        let g = oversampled_grid(d);
        let w = twiddles(g);
        let mask = (g - 1) as u64;
        let mut best = 0.0f64;
        let zero = Complex64::default();
        for j in 0..g as u64 {
            let mut s = self.coeff(0);
            // A partial sum with one term has sup norm equal to its modulus.
            let mut lone = (s != zero).then_some(s.norm());
            let mut count = lone.is_some() as usize;
            best = best.max(s.norm());
            for n in 1..=d as i64 {
                let (p, m) = (self.coeff(n), self.coeff(-n));
                if p == zero && m == zero {
                    continue;
                }
                let k = (n as u64 * j) & mask;
                s += p * w[k as usize] + m * w[((g as u64 - k) & mask) as usize];
                count += (p != zero) as usize + (m != zero) as usize;
                if count == 1 {
                    lone = Some(p.norm().max(m.norm()));
                }
                best = best.max(if count == 1 { lone.unwrap_or(0.0) } else { s.norm() });
            }
        }
        best
    }
}

/// Frequencies folded into `[0, G)`. Along runs of consecutive frequencies the
/// phasor `e^{i n t_j}` is advanced by one multiplication and reloaded from the
/// table every 512 terms.
struct Folded {
    terms: Vec<(u64, Complex64)>,
    run: Vec<bool>,
    w: Vec<Complex64>,
    mask: u64,
}

impl Folded {
    fn new(p: &TrigPoly, g: usize) -> Self {
        let terms: Vec<(u64, Complex64)> = p.terms().map(|(n, c)| (n.rem_euclid(g as i64) as u64, c)).collect();
        let run = (0..terms.len())
            .map(|k| k % 512 != 0 && terms[k].0 == terms[k - 1].0 + 1)
            .collect();
        Folded {
            terms,
            run,
            w: twiddles(g),
            mask: (g - 1) as u64,
        }
    }

    #[inline(always)]
    fn phasor(&self, n: u64, j: usize) -> Complex64 {
        self.w[((n * j as u64) & self.mask) as usize]
    }

    /// `{0, A_lo(t_j), ..., A_hi(t_j)}` into `pts`.
    fn prefix_points(&self, j: usize, pts: &mut Vec<(f64, f64)>) {
        let step = self.w[j];
        let (mut zr, mut zi) = (0.0f64, 0.0f64);
        let (mut ar, mut ai) = (0.0f64, 0.0f64);
        pts.clear();
        pts.push((0.0, 0.0));
        for (&(n, c), &run) in self.terms.iter().zip(&self.run) {
            if run {
                let r = zr * step.re - zi * step.im;
                zi = zr * step.im + zi * step.re;
                zr = r;
            } else {
                let z = self.phasor(n, j);
                zr = z.re;
                zi = z.im;
            }
            ar += c.re * zr - c.im * zi;
            ai += c.re * zi + c.im * zr;
            pts.push((ar, ai));
        }
    }
}

const LANES: usize = 8;

/// Largest width of the prefix-sum sets at nodes `base..base + LANES` along
/// the axes and diagonals, with the same arithmetic as
/// [`Folded::prefix_points`].
#[inline(always)]
fn width_bounds(f: &Folded, base: usize) -> [f64; LANES] {
    let g = f.w.len();
    let sr: [f64; LANES] = std::array::from_fn(|b| f.w[(base + b) % g].re);
    let si: [f64; LANES] = std::array::from_fn(|b| f.w[(base + b) % g].im);
    let (mut zr, mut zi) = ([0.0f64; LANES], [0.0f64; LANES]);
    let (mut ar, mut ai) = ([0.0f64; LANES], [0.0f64; LANES]);
    let (mut lx, mut hx, mut ly, mut hy) = ([0.0f64; LANES], [0.0f64; LANES], [0.0f64; LANES], [0.0f64; LANES]);
    let (mut ls, mut hs, mut ld, mut hd) = ([0.0f64; LANES], [0.0f64; LANES], [0.0f64; LANES], [0.0f64; LANES]);
    for (&(n, c), &run) in f.terms.iter().zip(&f.run) {
        if run {
            for b in 0..LANES {
                let r = zr[b] * sr[b] - zi[b] * si[b];
                zi[b] = zr[b] * si[b] + zi[b] * sr[b];
                zr[b] = r;
            }
        } else {
            for b in 0..LANES {
                let z = f.phasor(n, (base + b) % g);
                zr[b] = z.re;
                zi[b] = z.im;
            }
        }
        for b in 0..LANES {
            let x = ar[b] + (c.re * zr[b] - c.im * zi[b]);
            let y = ai[b] + (c.re * zi[b] + c.im * zr[b]);
            ar[b] = x;
            ai[b] = y;
            let (s, d) = (x + y, x - y);
            lx[b] = if x < lx[b] { x } else { lx[b] };
            hx[b] = if x > hx[b] { x } else { hx[b] };
            ly[b] = if y < ly[b] { y } else { ly[b] };
            hy[b] = if y > hy[b] { y } else { hy[b] };
            ls[b] = if s < ls[b] { s } else { ls[b] };
            hs[b] = if s > hs[b] { s } else { hs[b] };
            ld[b] = if d < ld[b] { d } else { ld[b] };
            hd[b] = if d > hd[b] { d } else { hd[b] };
        }
    }
    std::array::from_fn(|b| {
        let diag = (hs[b] - ls[b]).max(hd[b] - ld[b]) * std::f64::consts::FRAC_1_SQRT_2;
        (hx[b] - lx[b]).max(hy[b] - ly[b]).max(diag)
    })
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn width_bounds_avx512(f: &Folded, base: usize) -> [f64; LANES] {
    width_bounds(f, base)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn width_bounds_avx2(f: &Folded, base: usize) -> [f64; LANES] {
    width_bounds(f, base)
}

fn width_bounds_dispatch(f: &Folded, base: usize) -> [f64; LANES] {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx512f") {
            // SAFETY: the CPU supports AVX-512F, checked just above.
            return unsafe { width_bounds_avx512(f, base) };
        }
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the CPU supports AVX2, checked just above.
            return unsafe { width_bounds_avx2(f, base) };
        }
    }
    width_bounds(f, base)
}

/// Grid used for sup-norm estimates: 8x the degree, at least 8 points.
pub fn oversampled_grid(degree: u64) -> usize {
    dyadic_at_least(8 * degree.max(1))
}

/// The product `g . h_[r]` kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialProduct {
    pub g: TrigPoly,
    pub h: TrigPoly,
    pub r: u64,
}

impl SpecialProduct {
    pub fn new(g: TrigPoly, h: TrigPoly, r: u64) -> Result<Self> {
        let bound = 3 * g.degree();
        if r <= bound {
            return Err(Error::DilationTooSmall { r, bound });
        }
        Ok(SpecialProduct { g, h, r })
    }

    /// A plain polynomial as the product `p . 1_[r]`.
    pub fn plain(p: TrigPoly) -> Self {
        let r = 3 * p.degree() + 1;
        SpecialProduct { g: p, h: TrigPoly::one(), r }
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero() || self.h.is_zero()
    }

    pub fn lo(&self) -> Option<i64> {
        Some(self.g.lo()? + self.r as i64 * self.h.lo()?)
    }

    pub fn hi(&self) -> Option<i64> {
        Some(self.g.hi()? + self.r as i64 * self.h.hi()?)
    }

    pub fn degree(&self) -> u64 {
        match (self.lo(), self.hi()) {
            (Some(lo), Some(hi)) => lo.unsigned_abs().max(hi.unsigned_abs()),
            _ => 0,
        }
    }

    /// Number of nonzero coefficients; the blocks `spec g + r m` are disjoint.
    pub fn nnz(&self) -> usize {
        self.g.nnz() * self.h.nnz()
    }

    /// Exact because the frequency blocks are disjoint.
    pub fn coeff_sup(&self) -> f64 {
        self.g.coeff_sup() * self.h.coeff_sup()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.g.eval(t) * self.h.eval((self.r as f64 * t).rem_euclid(TAU))
    }

    /// Exact grid values: `r t_j` is the node `r j mod G`.
    pub fn sample(&self, g: usize) -> SampledFunction {
        let gv = self.g.sample(g);
        let hv = self.h.sample(g);
        let (gv, hv) = (gv.values(), hv.values());
        let r = self.r as usize % g;
        SampledFunction::new((0..g).map(|j| gv[j] * hv[(r * j) % g]).collect()).expect("dyadic grid")
    }

    pub fn materialize(&self) -> TrigPoly {
        self.g.multiply(&self.h.dilate(self.r))
    }

    /// Terms in increasing frequency without building a map.
    fn ordered_terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let r = self.r as i64;
        self.h
            .terms()
            .flat_map(move |(m, b)| self.g.terms().map(move |(n, a)| (n + r * m, a * b)))
    }

    /// Exact `P*(t)` by prefix sums over all `nnz(g) nnz(h)` terms.
    pub fn maximal_at(&self, t: f64) -> f64 {
        let mut pts = vec![(0.0, 0.0)];
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in self.ordered_terms() {
            acc += c * Complex64::from_polar(1.0, n as f64 * t);
            pts.push((acc.re, acc.im));
        }
        diameter(&mut pts)
    }

    /// Right side of the transfer inequality on a grid:
    /// `|g(t)| ||h*|| + 2 g*(t) ||h^||`, evaluated where `mask` holds (zero elsewhere).
    pub fn maximal_bound(&self, g: usize, hstar_sup: f64, mask: Option<&[bool]>) -> SampledFunction {
        let gv = self.g.sample(g);
        let gstar = match mask {
            Some(m) => self.g.maximal_on_nodes(g, m),
            None => self.g.maximal_on_grid(g),
        };
        let hc = self.h.coeff_sup();
        SampledFunction::new(
            (0..g)
                .map(|j| {
                    if mask.is_some_and(|m| !m[j]) {
                        return Complex64::default();
                    }
                    let v = gv.values()[j].norm() * hstar_sup + 2.0 * gstar.values()[j].re * hc;
                    Complex64::new(v, 0.0)
                })
                .collect(),
        )
        .expect("dyadic grid")
    }
}

/// `sup` of `h*` over the union of a fine grid and the nodes of `g_grid`.
pub fn hstar_sup(h: &TrigPoly, g_grid: usize) -> f64 {
    let fine = oversampled_grid(h.degree());
    // Dyadic grids nest, so a coarser grid adds no nodes.
    if g_grid <= fine {
        h.maximal_sup(fine)
    } else {
        h.maximal_sup(fine).max(h.maximal_sup(g_grid))
    }
}

/// `P = g . h_[r]` with a pointwise check of
/// `P*(t) <= |g(t)| ||h*|| + 2 g*(t) ||h^||` on a `G`-point grid.
pub fn special_product(g: &TrigPoly, h: &TrigPoly, r: u64, grid_size: usize) -> Result<(TrigPoly, Certificate)> {
    check_dyadic(grid_size)?;
    let sp = SpecialProduct::new(g.clone(), h.clone(), r)?;
    let p = sp.materialize();
    let cert = certify_special_product(&sp, &p, grid_size, 1e-9);
    Ok((p, cert))
}

/// Certificate for a materialised special product.
pub fn certify_special_product(sp: &SpecialProduct, p: &TrigPoly, grid_size: usize, slack: f64) -> Certificate {
    let lhs = p.maximal_on_grid(grid_size);
    let rhs = sp.maximal_bound(grid_size, hstar_sup(&sp.h, grid_size), None);
    let ratio = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(l, r)| {
            if l.re == 0.0 {
                0.0
            } else {
                l.re / r.re
            }
        })
        .fold(0.0, f64::max);
    let mut cert = Certificate::new(grid_size, slack);
    cert.holds("dilation_exceeds_3deg", sp.r > 3 * sp.g.degree())
        .le("transfer_ratio", 1.0, ratio);
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_basics() {
        assert!((TrigPoly::monomial(1, c(1.0, 0.0)).eval(0.0) - c(1.0, 0.0)).norm() < 1e-15);
        let p = TrigPoly::from_terms([(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        assert!(p.eval(PI).norm() < 1e-15);
        assert!(TrigPoly::one().eval_grid(8).unwrap().values().iter().all(|v| *v == c(1.0, 0.0)));
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = TrigPoly::monomial(4, c(1.0, 0.0));
        assert!(matches!(p.eval_grid(8), Err(Error::GridTooCoarse { .. })));
        assert!(p.eval_grid(16).is_ok());
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let p = TrigPoly::from_terms([(2, c(1.0, 0.0)), (2, c(-1.0, 0.0)), (3, c(0.5, 0.0))]);
        assert_eq!(p.spec().collect::<Vec<_>>(), vec![3]);
        assert!(TrigPoly::from_unique_terms([(1, c(1.0, 0.0)), (1, c(2.0, 0.0))]).is_err());
    }

    #[test]
    fn dilation_and_product() {
        let e1 = TrigPoly::monomial(1, c(1.0, 0.0));
        assert_eq!(e1.dilate(3), TrigPoly::monomial(3, c(1.0, 0.0)));
        assert_eq!(e1.dilate(1), e1);
        assert_eq!(e1.multiply(&TrigPoly::monomial(2, c(1.0, 0.0))), TrigPoly::monomial(3, c(1.0, 0.0)));
    }

    #[test]
    fn maximal_closed_forms() {
        let p = TrigPoly::monomial(5, c(0.0, 3.0));
        assert!(p.maximal(16).unwrap().values().iter().all(|v| (v.re - 3.0).abs() < 1e-12));
        let dir = TrigPoly::from_terms((0..8).map(|n| (n, c(1.0, 0.0))));
        assert!((dir.maximal(16).unwrap().values()[0].re - 8.0).abs() < 1e-12);
    }

    #[test]
    fn norms_of_cosine() {
        let p = TrigPoly::from_terms([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]);
        assert!((p.sup_norm() - 2.0).abs() < 1e-12);
        assert!((p.l2_norm() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.coeff_sup(), 1.0);
        assert!((p.u_norm() - 2.0).abs() < 1e-12);
        let m = TrigPoly::monomial(5, c(3.0, 0.0));
        for v in [m.sup_norm(), m.l2_norm(), m.coeff_sup()] {
            assert!((v - 3.0).abs() < 1e-12);
        }
        assert_eq!(TrigPoly::monomial(-4, c(0.0, 2.5)).u_norm(), 2.5);
    }

    #[test]
    fn special_product_small_cases() {
        let e1 = TrigPoly::monomial(1, c(1.0, 0.0));
        let (p, cert) = special_product(&e1, &e1, 4, 64).unwrap();
        assert_eq!(p, TrigPoly::monomial(5, c(1.0, 0.0)));
        assert!(cert.passed(), "{cert}");
        let h = TrigPoly::from_terms([(-2, c(0.3, 0.1)), (1, c(1.0, 0.0)), (3, c(-0.5, 0.2))]);
        let (p, cert) = special_product(&TrigPoly::one(), &h, 1, 64).unwrap();
        assert_eq!(p, h);
        assert!(cert.passed());
        assert!(matches!(special_product(&e1, &e1, 3, 64), Err(Error::DilationTooSmall { .. })));
    }

    #[test]
    fn factored_sampling_matches_materialised() {
        let g = TrigPoly::from_terms([(-3, c(0.5, 0.0)), (0, c(1.0, -1.0)), (2, c(0.2, 0.3))]);
        let h = TrigPoly::from_terms([(1, c(1.0, 0.0)), (4, c(0.0, 0.7))]);
        let sp = SpecialProduct::new(g, h, 11).unwrap();
        let p = sp.materialize();
        let a = sp.sample(64);
        let b = p.sample(64);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-12);
        }
        assert_eq!((sp.lo(), sp.hi()), (p.lo(), p.hi()));
        assert!((sp.coeff_sup() - p.coeff_sup()).abs() < 1e-15);
        for t in [0.1, 2.0, 5.5] {
            assert!((sp.maximal_at(t) - p.maximal_at(t)).abs() < 1e-12);
        }
    }
}
