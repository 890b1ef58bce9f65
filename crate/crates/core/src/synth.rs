//! Flat correction polynomials: close to 1 off a small set, with uniformly small
//! Fourier coefficients, found by projections between two convex sets.
//!
//! `A` holds the coefficient constraint (support and modulus), `B` the value
//! constraint `|h - 1| <= eta` off an exceptional set `E`. The iteration starts
//! from an outer-function seed that is already flat off `E`, runs alternating
//! projections and, if those stall, a Douglas-Rachford phase.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::Certificate;
use crate::grid::{dyadic_at_least, Transform};
use crate::sampling::measure_above;
use crate::trigpoly::TrigPoly;
use crate::{Error, Result};

/// Which frequencies a flat polynomial may use besides the excluded zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spectrum {
    /// `[1, D]`.
    Analytic,
    /// `[-D, D] \ {0}`.
    Bilateral,
}

/// Contract `m{|h - 1| > closeness} < bad_measure`, `max |c(n)| < coeff_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTarget {
    pub bad_measure: f64,
    pub closeness: f64,
    pub coeff_bound: f64,
}

impl FlatTarget {
    pub fn uniform(eps: f64) -> Self {
        FlatTarget {
            bad_measure: eps,
            closeness: eps,
            coeff_bound: eps,
        }
    }

    /// Lower bound on `sum |c(n)|^2` for analytic `h` meeting the target.
    ///
    /// `1 - h` has constant term 1 and modulus at most `closeness` on a set of
    /// measure at least `1 - bad_measure`, so Jensen's formula forces large
    /// values on the rest of the circle.
    pub fn energy_floor(&self) -> f64 {
        let (mu, eta) = (self.bad_measure.min(1.0), self.closeness);
        if eta >= 1.0 || mu >= 1.0 {
            return 0.0;
        }
        (mu * eta.powf(-2.0 * (1.0 - mu) / mu) - 1.0).max(0.0)
    }

    /// Fewest coefficients of modulus below `coeff_bound` carrying [`energy_floor`](Self::energy_floor).
    pub fn min_coefficients(&self) -> f64 {
        self.energy_floor() / (self.coeff_bound * self.coeff_bound)
    }
}

/// Tuning of the projection scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// First degree tried; doubled up to `budget`.
    pub start_degree: usize,
    pub budget: usize,
    /// Number of arcs forming the exceptional set (capped at `D / 16`).
    pub arcs: usize,
    pub ap_iters: usize,
    pub dr_iters: usize,
    /// Synthesis grid size per unit of degree.
    pub oversample: usize,
    /// Inner tolerance factor for coefficients, values and the measure of `E`.
    pub inner: f64,
    /// Cap on `h*` (bilateral problems).
    pub maximal_cap: Option<f64>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            start_degree: 64,
            budget: 4096,
            arcs: 64,
            ap_iters: 300,
            dr_iters: 900,
            oversample: 8,
            inner: 0.9,
            maximal_cap: None,
            seed: 0,
        }
    }
}

/// A synthesized flat polynomial and how it was found.
#[derive(Debug, Clone)]
pub struct FlatPoly {
    pub h: TrigPoly,
    pub certificate: Certificate,
    pub degree: usize,
    pub iterations: usize,
    pub exceptional_measure: f64,
    /// Whether the alternating-projection residual never increased.
    pub monotone: bool,
}

/// Kind of flat-polynomial contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemKind {
    /// `spec h ⊂ [1, D]`, `rho(h, 1) < eps`, `max |c(n)| < eps`.
    Analytic { eps: f64 },
    /// `c(0) = 0`, `max |c(n)| < delta`, `m{|h - 1| > delta} < C gamma`, `||h*|| <= 1/gamma`.
    Bilateral { gamma: f64, delta: f64, c_target: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisProblem {
    pub kind: ProblemKind,
    pub degree_budget: usize,
    pub arcs: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl SynthesisProblem {
    pub fn analytic(eps: f64, budget: usize, seed: u64) -> Self {
        SynthesisProblem {
            kind: ProblemKind::Analytic { eps },
            degree_budget: budget,
            arcs: 64,
            max_iters: 1200,
            seed,
        }
    }

    pub fn bilateral(gamma: f64, delta: f64, c_target: f64, budget: usize, seed: u64) -> Self {
        SynthesisProblem {
            kind: ProblemKind::Bilateral { gamma, delta, c_target },
            degree_budget: budget,
            arcs: 64,
            max_iters: 1200,
            seed,
        }
    }

    fn config(&self) -> SynthConfig {
        let ap = self.max_iters / 4;
        SynthConfig {
            budget: self.degree_budget,
            arcs: self.arcs,
            ap_iters: ap,
            dr_iters: self.max_iters - ap,
            seed: self.seed,
            ..SynthConfig::default()
        }
    }
}

/// Analytic flat polynomial: `spec h ⊂ [1, D]`, `rho(h, 1) < eps`, `max |c(n)| < eps`.
pub fn synth_flat_analytic(eps: f64, budget: usize, seed: u64) -> Result<FlatPoly> {
    solve_problem(&SynthesisProblem::analytic(eps, budget, seed))
}

/// Two-sided flat polynomial with `h*` capped at `1/gamma`; the achieved constant
/// `m{|h - 1| > delta} / gamma` is reported in the certificate.
pub fn synth_flat_bilateral(gamma: f64, delta: f64, c_target: f64, budget: usize, seed: u64) -> Result<FlatPoly> {
    solve_problem(&SynthesisProblem::bilateral(gamma, delta, c_target, budget, seed))
}

pub fn solve_problem(problem: &SynthesisProblem) -> Result<FlatPoly> {
    let cfg = problem.config();
    match problem.kind {
        ProblemKind::Analytic { eps } => {
            if !(eps > 0.0 && eps < 2.0) {
                return Err(Error::InvalidEpsilon(eps));
            }
            let mut out = synth_flat(Spectrum::Analytic, FlatTarget::uniform(eps), &cfg)?;
            out.certificate = verify_flat_contract(&out.h, problem);
            Ok(out)
        }
        ProblemKind::Bilateral { gamma, delta, c_target } => {
            if !(gamma > 0.0 && gamma < 1.0 && delta > 0.0 && delta < 1.0 && c_target > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "gamma {gamma}, delta {delta}, C {c_target}"
                )));
            }
            let target = FlatTarget {
                bad_measure: (c_target * gamma).min(1.0),
                closeness: delta,
                coeff_bound: delta,
            };
            let cfg = SynthConfig {
                maximal_cap: Some(1.0 / gamma),
                ..cfg
            };
            let mut out = synth_flat(Spectrum::Bilateral, target, &cfg)?;
            out.certificate = verify_flat_contract(&out.h, problem);
            Ok(out)
        }
    }
}

/// Searches degrees `start_degree, 2 start_degree, ..., budget` for a polynomial
/// meeting `target`, verified on a grid four times finer than the synthesis grid.
pub fn synth_flat(spectrum: Spectrum, target: FlatTarget, cfg: &SynthConfig) -> Result<FlatPoly> {
    let FlatTarget {
        bad_measure,
        closeness,
        coeff_bound,
    } = target;
    if !(bad_measure > 0.0 && closeness > 0.0 && coeff_bound > 0.0) {
        return Err(Error::InvalidParams(format!("{target:?}")));
    }
    if spectrum == Spectrum::Analytic && target.min_coefficients() > cfg.budget as f64 {
        return Err(Error::Infeasible {
            max_degree: cfg.budget,
            reason: format!(
                "energy floor {:.4e} needs at least {:.4e} coefficients below {coeff_bound}",
                target.energy_floor(),
                target.min_coefficients()
            ),
        });
    }
    let mut d = cfg.start_degree.max(8).min(cfg.budget);
    loop {
        let run = Projector::new(spectrum, target, d, cfg).run();
        let cert = verify_target(&run.h, spectrum, target, d, cfg.maximal_cap);
        if cert.passed() {
            return Ok(FlatPoly { certificate: cert, ..run });
        }
        if d >= cfg.budget {
            let why = cert
                .first_failure()
                .map(|f| format!("{} measured {:.4e} vs {:.4e}", f.name, f.measured, f.bound))
                .unwrap_or_default();
            return Err(Error::Infeasible {
                max_degree: cfg.budget,
                reason: why,
            });
        }
        d = (2 * d).min(cfg.budget);
    }
}

/// Independent check of a generic flat target on `4 * oversample * D` points.
pub fn verify_target(h: &TrigPoly, spectrum: Spectrum, target: FlatTarget, d: usize, cap: Option<f64>) -> Certificate {
    let g = verification_grid(h, d);
    let vals = h.sample(g);
    let dev = vals.map(|_, v| v - 1.0);
    let mut cert = Certificate::new(g, 0.0);
    cert.holds("spectrum", spectrum_ok(h, spectrum, d))
        .holds("zero_mean", h.coeff(0) == Complex64::default())
        .lt("bad_measure", target.bad_measure, measure_above(&dev, target.closeness))
        .lt("coeff_sup", target.coeff_bound, h.coeff_sup());
    if let Some(cap) = cap {
        cert.le("maximal_sup", cap, h.maximal_sup(g));
    }
    cert
}

fn spectrum_ok(h: &TrigPoly, spectrum: Spectrum, d: usize) -> bool {
    let d = d as i64;
    match spectrum {
        Spectrum::Analytic => h.spec().all(|n| (1..=d).contains(&n)),
        Spectrum::Bilateral => h.spec().all(|n| n != 0 && n.abs() <= d),
    }
}

fn verification_grid(h: &TrigPoly, d: usize) -> usize {
    4 * 8 * dyadic_at_least(h.degree().max(d as u64))
}

/// Re-checks the exact contract of a problem on a fresh grid four times finer
/// than the synthesis grid; never looks at synthesis state.
pub fn verify_flat_contract(h: &TrigPoly, problem: &SynthesisProblem) -> Certificate {
    let d = (h.degree() as usize).max(1);
    let g = verification_grid(h, d);
    let vals = h.sample(g);
    let dev = vals.map(|_, v| v - 1.0);
    let mut cert = Certificate::new(g, 0.0);
    match problem.kind {
        ProblemKind::Analytic { eps } => {
            let rho = crate::sampling::rho_of_moduli(dev.values().iter().map(|v| v.norm()).collect());
            cert.holds(
                "spectrum_in_1_to_budget",
                h.spec().all(|n| n >= 1 && n as usize <= problem.degree_budget),
            )
            .holds("zero_mean", h.coeff(0) == Complex64::default())
            .lt("rho_to_one", eps, rho)
            .lt("coeff_sup", eps, h.coeff_sup());
        }
        ProblemKind::Bilateral { gamma, delta, c_target } => {
            let bad = measure_above(&dev, delta);
            cert.holds("zero_mean", h.coeff(0) == Complex64::default())
                .holds(
                    "spectrum_in_budget",
                    h.spec().all(|n| n.unsigned_abs() as usize <= problem.degree_budget),
                )
                .lt("coeff_sup", delta, h.coeff_sup())
                .lt("bad_measure", c_target * gamma, bad)
                .le("achieved_constant", c_target, bad / gamma)
                .le("maximal_sup", 1.0 / gamma, h.maximal_sup(g));
        }
    }
    cert
}

/// Exceptional set: `arcs` stratified random arcs of total measure `measure`
/// (a single arc centred at 0 when `arcs == 1`).
pub fn exceptional_mask(g: usize, measure: f64, arcs: usize, rng: &mut impl Rng) -> Vec<bool> {
    let k = arcs.max(1);
    let w = measure.clamp(0.0, 1.0) / k as f64;
    let starts: Vec<f64> = if k == 1 {
        vec![-w / 2.0]
    } else {
        (0..k)
            .map(|i| (i as f64 + rng.gen::<f64>() * (1.0 - w * k as f64)) / k as f64)
            .collect()
    };
    let mut mask = vec![false; g];
    for s in starts {
        let lo = (s * g as f64).ceil() as i64;
        let hi = ((s + w) * g as f64).ceil() as i64;
        for j in lo..hi {
            mask[j.rem_euclid(g as i64) as usize] = true;
        }
    }
    mask
}

struct Projector {
    spectrum: Spectrum,
    target: FlatTarget,
    d: usize,
    g: usize,
    fft: Transform,
    exceptional: Vec<bool>,
    coeff_cap: f64,
    value_cap: f64,
    ap_iters: usize,
    dr_iters: usize,
    maximal_cap: Option<f64>,
    seed_eta: f64,
    accept_measure: f64,
}

impl Projector {
    fn new(spectrum: Spectrum, target: FlatTarget, d: usize, cfg: &SynthConfig) -> Self {
        let g = dyadic_at_least((cfg.oversample * d) as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (d as u64).rotate_left(32));
        let arcs = cfg.arcs.min((d / 16).max(1));
        let exceptional = exceptional_mask(g, cfg.inner * target.bad_measure.min(1.0), arcs, &mut rng);
        Projector {
            spectrum,
            target,
            d,
            g,
            fft: Transform::new(g),
            exceptional,
            coeff_cap: cfg.inner * target.coeff_bound,
            value_cap: cfg.inner * target.closeness,
            ap_iters: cfg.ap_iters,
            dr_iters: cfg.dr_iters,
            maximal_cap: cfg.maximal_cap,
            seed_eta: 0.7 * target.closeness.min(0.99),
            accept_measure: target.bad_measure * (1.0 + cfg.inner) / 2.0,
        }
    }

    fn in_spectrum(&self, k: usize) -> bool {
        match self.spectrum {
            Spectrum::Analytic => (1..=self.d).contains(&k),
            Spectrum::Bilateral => k != 0 && (k <= self.d || k >= self.g - self.d),
        }
    }

    /// Projection onto the coefficient set; returns the projected bins too.
    fn project_a(&self, x: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut bins = x.to_vec();
        self.fft.to_bins(&mut bins);
        for (k, b) in bins.iter_mut().enumerate() {
            if !self.in_spectrum(k) {
                *b = Complex64::default();
            } else if b.norm() > self.coeff_cap {
                *b *= self.coeff_cap / b.norm();
            }
        }
        let mut vals = bins.clone();
        self.fft.to_values(&mut vals);
        (vals, bins)
    }

    fn project_b(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.iter()
            .zip(&self.exceptional)
            .map(|(&v, &free)| {
                let dev = v - 1.0;
                let m = dev.norm();
                if free || m <= self.value_cap {
                    v
                } else {
                    1.0 + dev * (self.value_cap / m)
                }
            })
            .collect()
    }

    /// `1 - Psi / Psi^(0)` with `Psi` the outer function whose log-modulus is
    /// `log(eta0)` off a smoothed copy of `E` and mean zero.
    fn seed(&self) -> Vec<Complex64> {
        let g = self.g;
        let mut b: Vec<Complex64> = self
            .exceptional
            .iter()
            .map(|&e| Complex64::new(e as u8 as f64, 0.0))
            .collect();
        self.fft.to_bins(&mut b);
        let sigma = 2.0;
        for (k, v) in b.iter_mut().enumerate() {
            let f = if k <= g / 2 { k as f64 } else { k as f64 - g as f64 };
            *v *= (-0.5 * (TAU * f * sigma / g as f64).powi(2)).exp();
        }
        let mean = b[0].re;
        if mean <= 0.0 {
            return vec![Complex64::default(); g];
        }
        let lift = -self.seed_eta.ln() / mean;
        // Bins of v = log(eta0) + lift * smoothed(E), then its analytic extension.
        let mut ext = vec![Complex64::default(); g];
        ext[0] = Complex64::new(self.seed_eta.ln(), 0.0) + lift * b[0];
        for k in 1..g / 2 {
            ext[k] = 2.0 * lift * b[k];
        }
        self.fft.to_values(&mut ext);
        let mut psi: Vec<Complex64> = ext.iter().map(|v| v.exp()).collect();
        let mut bins = psi.clone();
        self.fft.to_bins(&mut bins);
        let p0 = bins[0];
        psi.iter_mut().for_each(|v| *v = 1.0 - *v / p0);
        psi
    }

    fn bins_to_poly(&self, bins: &[Complex64]) -> TrigPoly {
        let g = self.g as i64;
        TrigPoly::from_terms(bins.iter().enumerate().filter(|(k, _)| self.in_spectrum(*k)).map(|(k, &c)| {
            let k = k as i64;
            (if k > g / 2 { k - g } else { k }, c)
        }))
    }

    fn bad_on_grid(&self, vals: &[Complex64]) -> f64 {
        let eta = self.target.closeness;
        vals.iter().filter(|v| (*v - 1.0).norm() > eta).count() as f64 / vals.len() as f64
    }

    /// Scales a candidate so its maximal function respects the cap.
    fn cap_maximal(&self, h: TrigPoly) -> TrigPoly {
        match self.maximal_cap {
            Some(cap) if !h.is_zero() => {
                let m = h.maximal_sup(self.g);
                if m > 0.99 * cap {
                    h.scale(Complex64::new(0.99 * cap / m, 0.0))
                } else {
                    h
                }
            }
            _ => h,
        }
    }

    /// Early exit keeps a margin for the finer verification grid.
    fn accept(&self, vals: &[Complex64]) -> bool {
        self.bad_on_grid(vals) < self.accept_measure
    }

    fn finish(&self, bins: &[Complex64], iterations: usize, monotone: bool) -> FlatPoly {
        let h = self.cap_maximal(self.bins_to_poly(bins));
        FlatPoly {
            h,
            certificate: Certificate::new(self.g, 0.0),
            degree: self.d,
            iterations,
            exceptional_measure: crate::sampling::measure(&self.exceptional),
            monotone,
        }
    }

    fn run(&self) -> FlatPoly {
        const CHECK_EVERY: usize = 25;
        let mut x = self.seed();
        let (mut vals, mut bins) = self.project_a(&x);
        let mut residual = f64::INFINITY;
        let mut monotone = true;
        for it in 0..self.ap_iters {
            let pb = self.project_b(&vals);
            let r = dist(&pb, &vals);
            if r > residual * (1.0 + 1e-9) + 1e-12 {
                monotone = false;
            }
            residual = r;
            (vals, bins) = self.project_a(&pb);
            if it % CHECK_EVERY == CHECK_EVERY - 1 && self.maximal_cap.is_none() && self.accept(&vals) {
                return self.finish(&bins, it + 1, monotone);
            }
        }
        if self.accept(&vals) {
            return self.finish(&bins, self.ap_iters, monotone);
        }
        x.copy_from_slice(&vals);
        for it in 0..self.dr_iters {
            let pb = self.project_b(&x);
            let reflect: Vec<Complex64> = pb.iter().zip(&x).map(|(p, v)| 2.0 * p - v).collect();
            let (pa, _) = self.project_a(&reflect);
            for ((v, a), b) in x.iter_mut().zip(&pa).zip(&pb) {
                *v += a - b;
            }
            if it % CHECK_EVERY == CHECK_EVERY - 1 || it + 1 == self.dr_iters {
                let pb = self.project_b(&x);
                let (cand, cbins) = self.project_a(&pb);
                vals = cand;
                bins = cbins;
                if self.maximal_cap.is_none() && self.accept(&vals) {
                    return self.finish(&bins, self.ap_iters + it + 1, monotone);
                }
            }
        }
        self.finish(&bins, self.ap_iters + self.dr_iters, monotone)
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
