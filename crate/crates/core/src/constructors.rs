//! Indicator polynomials, step polynomials and (P, Q) pairs.
//!
//! All three are special products `g . h_[r]`: `g` is a combination of trapezoid
//! partial sums, `h` an analytic flat polynomial, and the maximal function of
//! the product is controlled through
//! `P*(t) <= |g(t)| ||h*|| + 2 g*(t) ||h^||`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::certificate::Certificate;
use crate::grid::{dyadic_at_least, Transform};
use crate::sampling::{
    self, measure, rho, rho_of_moduli, rho_on, step_approximate, trapezoid_partial_sum, trapezoid_tail_bound,
    CircleArc, SampledFunction, StepFunction,
};
use crate::synth::{synth_flat, synth_flat_bilateral, FlatPoly, FlatTarget, Spectrum, SynthConfig};
use crate::trigpoly::{hstar_sup, SpecialProduct, TrigPoly};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructorConfig {
    /// Flat-polynomial search used for `h`.
    pub synth: SynthConfig,
    /// Grid for standalone indicator certificates.
    pub grid: usize,
    /// Largest trapezoid order tried.
    pub max_order: u64,
    /// Degree budget of the two-sided flat polynomial in U-norm pairs.
    pub bilateral_budget: usize,
    /// Closeness of that polynomial, relative to the pair's `delta`.
    pub bilateral_delta_ratio: f64,
    /// Target constant `C` for two-sided constructions.
    pub c_target: f64,
}

impl Default for ConstructorConfig {
    fn default() -> Self {
        ConstructorConfig {
            synth: SynthConfig {
                budget: 65536,
                arcs: 4096,
                ..SynthConfig::default()
            },
            grid: 1 << 15,
            max_order: 1 << 17,
            bilateral_budget: 256,
            bilateral_delta_ratio: 0.5,
            c_target: 4.0,
        }
    }
}

/// How a special product was assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildInfo {
    pub target: FlatTarget,
    pub flat_degree: usize,
    pub order: u64,
    pub r: u64,
    pub hstar: f64,
    pub g_maximal_on_check: f64,
}

/// A constructor output with its certificate.
#[derive(Debug, Clone)]
pub struct Built {
    pub poly: SpecialProduct,
    pub certificate: Certificate,
    pub info: Option<BuildInfo>,
}

impl Built {
    fn zero(cert: Certificate) -> Self {
        Built {
            poly: SpecialProduct::plain(TrigPoly::zero()),
            certificate: cert,
            info: None,
        }
    }
}

struct Piece {
    arc: CircleArc,
    value: Complex64,
    ramp: f64,
    order0: u64,
}

/// Shared construction: `g = sum v_j T_j` over trapezoids, one flat `h`, one `r`.
fn arc_product(
    pieces: &[(CircleArc, Complex64, f64)],
    delta: f64,
    grid: usize,
    check: &[bool],
    exclude: f64,
    cfg: &ConstructorConfig,
) -> Result<(SpecialProduct, FlatPoly, BuildInfo)> {
    let pieces: Vec<Piece> = pieces
        .iter()
        .map(|&(arc, value, dj)| {
            let ramp = sampling::default_ramp(dj);
            let mut order0 = 16;
            while trapezoid_tail_bound(ramp, order0) >= dj / 6.0 {
                order0 *= 2;
            }
            Piece { arc, value, ramp, order0 }
        })
        .collect();
    let combine = |scale: u64| {
        pieces.iter().fold(TrigPoly::zero(), |acc, p| {
            acc.add(&trapezoid_partial_sum(&p.arc, p.ramp, p.order0 * scale).scale(p.value))
        })
    };
    let g0 = combine(1);
    let g0_star = quantile_excluding(g0.maximal_on_nodes(grid, check).values(), check, exclude).max(1e-6);
    let vmax = pieces.iter().map(|p| p.value.norm()).fold(0.0, f64::max).max(1.0);
    let support: f64 = pieces.iter().map(|p| p.arc.measure()).sum::<f64>().min(1.0);
    let ramps: f64 = pieces.iter().map(|p| p.ramp / PI).sum();
    let room = delta - ramps - 4.0 / grid as f64;
    if room <= 0.0 {
        return Err(Error::SynthFailed(format!(
            "ramps of measure {ramps:.4e} exhaust the budget {delta:.4e}"
        )));
    }
    let target = FlatTarget {
        bad_measure: (0.85 * room / support).min(0.9),
        closeness: (0.8 * delta / vmax).min(0.9),
        coeff_bound: (0.42 * delta / (1.05 * g0_star)).min(0.9),
    };
    let flat = synth_flat(Spectrum::Analytic, target, &cfg.synth).map_err(|e| Error::SynthFailed(e.to_string()))?;
    let hstar = hstar_sup(&flat.h, grid);
    let mut scale = 1;
    let g = loop {
        let g = combine(scale);
        let off = quantile_excluding(g.sample(grid).values(), check, exclude);
        if off * hstar <= delta / 10.0 || pieces[0].order0 * scale * 2 > cfg.max_order {
            break g;
        }
        scale *= 2;
    };
    let r = {
        let r = 3 * g.degree() + 1;
        r | 1
    };
    let order = pieces.iter().map(|p| p.order0 * scale).max().unwrap_or(0);
    let sp = SpecialProduct::new(g, flat.h.clone(), r)?;
    let info = BuildInfo {
        target,
        flat_degree: flat.degree,
        order,
        r,
        hstar,
        g_maximal_on_check: g0_star,
    };
    Ok((sp, flat, info))
}

/// Smallest level exceeded by `|v|` on at most `exclude` (normalized measure) of `mask`.
fn quantile_excluding(vals: &[Complex64], mask: &[bool], exclude: f64) -> f64 {
    let mut m: Vec<f64> = vals.iter().zip(mask).filter(|(_, &c)| c).map(|(v, _)| v.norm()).collect();
    m.sort_unstable_by(|a, b| b.total_cmp(a));
    let skip = (exclude * vals.len() as f64).floor() as usize;
    m.get(skip).copied().unwrap_or(0.0)
}

/// Analytic `P` with `rho(P, 1_I) < delta` and `P* < delta` outside the
/// `delta`-neighbourhood of `I`.
pub fn indicator_polynomial(arc: &CircleArc, delta: f64, cfg: &ConstructorConfig) -> Result<Built> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta {delta} outside (0, 1)")));
    }
    let grid = cfg.grid;
    if arc.length == 0.0 {
        let mut cert = Certificate::new(grid, 0.0);
        cert.holds("analytic_spectrum", true)
            .lt("rho_to_indicator", delta, 0.0)
            .lt("maximal_off_neighbourhood", delta, 0.0);
        return Ok(Built::zero(cert));
    }
    let check = arc.outside_neighbourhood(delta, grid);
    let (sp, flat, info) = arc_product(&[(*arc, Complex64::new(1.0, 0.0), delta)], delta, grid, &check, 0.0, cfg)?;
    let mut cert = certify_indicator(&sp, arc, delta, grid)?;
    cert.extend("flat.", &flat.certificate);
    Ok(Built {
        poly: sp,
        certificate: cert,
        info: Some(info),
    })
}

/// Largest `P*(t) / bound(t)` over a few nodes of `mask`, with `P*` summed exactly.
fn sampled_transfer_ratio(sp: &SpecialProduct, rhs: &SampledFunction, mask: &[bool], count: usize) -> f64 {
    let nodes: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
    if nodes.is_empty() || sp.is_zero() {
        return 0.0;
    }
    let step = (nodes.len() / count).max(1);
    let g = mask.len();
    nodes
        .iter()
        .step_by(step)
        .take(count)
        .map(|&j| {
            let lhs = sp.maximal_at(crate::grid::node(j, g));
            let b = rhs.values()[j].re;
            if lhs == 0.0 {
                0.0
            } else {
                lhs / b
            }
        })
        .fold(0.0, f64::max)
}

/// Analytic `P` with `rho(P, phi) < delta` and `rho(P* 1_U, 0) < delta`, for a
/// step function `phi` vanishing on the grid set `U`.
pub fn step_polynomial(phi: &StepFunction, u: &[bool], delta: f64, cfg: &ConstructorConfig) -> Result<Built> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta {delta} outside (0, 1)")));
    }
    let grid = u.len();
    let target = phi.sample(grid)?;
    if target.values().iter().zip(u).any(|(v, &inside)| inside && v.norm() > 0.0) {
        return Err(Error::InvalidParams("step function does not vanish on U".into()));
    }
    let arcs: Vec<(CircleArc, Complex64)> = phi.arcs().filter(|(_, v)| v.norm() > 0.0).collect();
    if arcs.is_empty() {
        let mut cert = Certificate::new(grid, 0.0);
        cert.holds("analytic_spectrum", true)
            .lt("rho_to_step", delta, 0.0)
            .lt("maximal_on_u", delta, 0.0);
        return Ok(Built::zero(cert));
    }
    let m = arcs.len() as f64;
    let pieces: Vec<(CircleArc, Complex64, f64)> = arcs
        .iter()
        .map(|&(a, v)| (a, v, delta / (m * v.norm().max(1.0))))
        .collect();
    let (sp, flat, info) = arc_product(&pieces, delta, grid, u, delta / 3.0, cfg)?;
    let mut cert = certify_step(&sp, phi, u, delta)?;
    cert.extend("flat.", &flat.certificate);
    Ok(Built {
        poly: sp,
        certificate: cert,
        info: Some(info),
    })
}

/// Output of [`pq_pair`] and [`pq_pair_u`].
#[derive(Debug, Clone)]
pub struct PqPair {
    pub p: SpecialProduct,
    pub q: SpecialProduct,
    pub phi: StepFunction,
    pub certificate: Certificate,
    /// `m{|P + Q - psi| > delta} / gamma` for U-norm pairs.
    pub achieved_c: Option<f64>,
}

/// Fejer mean of order `m` of grid samples; bounded by their maximum modulus.
pub fn fejer_mean(samples: &SampledFunction, m: usize) -> TrigPoly {
    let g = samples.grid();
    assert!(m < g, "Fejer order must be below the grid size");
    let mut bins = samples.values().to_vec();
    Transform::new(g).to_bins(&mut bins);
    let m = m as i64;
    TrigPoly::from_terms((-m..=m).map(|n| {
        let w = 1.0 - n.abs() as f64 / (m + 1) as f64;
        (n, bins[n.rem_euclid(g as i64) as usize] * w)
    }))
}

/// `phi` equal to `s` off `U` and zero on `U`, with arcs split at the boundaries of `U`.
fn vanish_on(s: &StepFunction, u: &[bool]) -> Result<StepFunction> {
    let g = u.len();
    let sv = s.sample(g)?;
    let vals: Vec<Complex64> = (0..g)
        .map(|j| if u[j] { Complex64::default() } else { sv.values()[j] })
        .collect();
    // Break at every node where the value changes; arcs are [t_j, t_{j+1}).
    let mut bps = Vec::new();
    let mut out = Vec::new();
    for j in 0..g {
        if j == 0 || vals[j] != vals[j - 1] {
            bps.push(crate::grid::node(j, g));
            out.push(vals[j]);
        }
    }
    StepFunction::new(bps, out).map(|f| f.simplify())
}

/// `P` analytic and `Q` with `||Q|| < a` such that `rho(P + Q, psi) < delta` and
/// `rho(P* 1_U, 0) < delta`, given `|psi| < a` on the grid set `U`.
pub fn pq_pair(psi: &StepFunction, u: &[bool], a: f64, delta: f64, cfg: &ConstructorConfig) -> Result<PqPair> {
    let g = u.len();
    let ps = psi.sample(g)?;
    let max_on_u = ps
        .values()
        .iter()
        .zip(u)
        .filter(|(_, &i)| i)
        .map(|(v, _)| v.norm())
        .fold(0.0, f64::max);
    if max_on_u >= a {
        return Err(Error::ClippingInfeasible { max_on_u, a });
    }
    let clip = 0.99 * a;
    let input = ps.map(|j, v| {
        if !u[j] {
            Complex64::default()
        } else if v.norm() > clip {
            v * (clip / v.norm())
        } else {
            v
        }
    });
    let mut q = TrigPoly::zero();
    let mut rho_q = rho_on(&q.sample(g), &ps, u)?;
    let mut order = 8;
    while rho_q >= delta / 4.0 && order < g / 2 {
        q = fejer_mean(&input, order);
        rho_q = rho_on(&q.sample(g), &ps, u)?;
        order *= 2;
    }
    let qs = q.sample(g);
    let rest = &ps - &qs;
    let off_u = rest.restrict(&u.iter().map(|b| !b).collect::<Vec<_>>());
    let phi = if rho(&off_u, &SampledFunction::zeros(g)?)? < delta / 4.0 {
        StepFunction::constant(Complex64::default())
    } else {
        vanish_on(&step_approximate(&off_u, delta / 4.0)?, u)?
    };
    let rho_phi = rho(&phi.sample(g)?, &rest)?;
    let budget = 0.9 * (delta - rho_phi);
    if budget <= 0.0 {
        return Err(Error::SynthFailed(format!("no budget left for P (rho_phi = {rho_phi:.4e})")));
    }
    let built = step_polynomial(&phi, u, budget.min(0.999), cfg)?;
    let p = built.poly;
    let q = SpecialProduct::plain(q);
    let mut cert = certify_pair(&p, &q, psi, u, a, delta)?;
    cert.extend("p.", &built.certificate);
    Ok(PqPair {
        p,
        q,
        phi,
        certificate: cert,
        achieved_c: None,
    })
}

/// U-norm variant: `Q' = Q . h_[r]` with a two-sided flat `h`, so that
/// `m{|P + Q' - psi| > delta} < C gamma` and `||Q'||_U < a / gamma`.
pub fn pq_pair_u(
    psi: &StepFunction,
    u: &[bool],
    a: f64,
    gamma: f64,
    delta: f64,
    cfg: &ConstructorConfig,
) -> Result<PqPair> {
    let c_target = cfg.c_target;
    let base = pq_pair(psi, u, a, delta / 2.0, cfg)?;
    let q = base.q.g.clone();
    let (q_prime, flat) = if q.is_zero() {
        (SpecialProduct::plain(TrigPoly::zero()), None)
    } else {
        let dprime = delta * cfg.bilateral_delta_ratio;
        let flat = synth_flat_bilateral(gamma, dprime, c_target, cfg.bilateral_budget, cfg.synth.seed)
            .map_err(|e| Error::SynthFailed(e.to_string()))?;
        let r = (3 * q.degree() + 1) | 1;
        (SpecialProduct::new(q, flat.h.clone(), r)?, Some(flat.certificate))
    };
    let (mut cert, achieved_c) = certify_pair_u(&base.p, &q_prime, psi, u, a, gamma, delta, c_target)?;
    if let Some(fc) = &flat {
        cert.extend("flat.", fc);
    }
    cert.extend("pair.", &base.certificate);
    Ok(PqPair {
        p: base.p,
        q: q_prime,
        phi: base.phi,
        certificate: cert,
        achieved_c: Some(achieved_c),
    })
}

/// `sup h*` for the inner factor (1 when the product is a plain polynomial).
fn inner_hstar(sp: &SpecialProduct, grid: usize) -> f64 {
    if sp.h == TrigPoly::one() {
        1.0
    } else {
        hstar_sup(&sp.h, grid)
    }
}

fn analytic(sp: &SpecialProduct) -> bool {
    sp.lo().map_or(true, |lo| lo >= 0)
}

/// Clauses (1)-(3) of an indicator polynomial, recomputed from the product alone.
pub fn certify_indicator(sp: &SpecialProduct, arc: &CircleArc, delta: f64, grid: usize) -> Result<Certificate> {
    let check = arc.outside_neighbourhood(delta, grid);
    let rhs = sp.maximal_bound(grid, inner_hstar(sp, grid), Some(&check));
    let mut cert = Certificate::new(grid, 0.0);
    cert.holds("analytic_spectrum", analytic(sp))
        .lt("rho_to_indicator", delta, rho(&sp.sample(grid), &arc.indicator(grid)?)?)
        .lt("maximal_off_neighbourhood", delta, rhs.sup())
        .le("transfer_on_sample", 1.0, sampled_transfer_ratio(sp, &rhs, &check, 4));
    Ok(cert)
}

/// `rho(P* 1_U, 0)` through the transfer bound.
fn maximal_on(sp: &SpecialProduct, u: &[bool]) -> (f64, SampledFunction) {
    let grid = u.len();
    let rhs = sp.maximal_bound(grid, inner_hstar(sp, grid), Some(u));
    (rho_of_moduli(rhs.values().iter().map(|v| v.re).collect()), rhs)
}

/// Clauses (4)-(5) of a step polynomial.
pub fn certify_step(sp: &SpecialProduct, phi: &StepFunction, u: &[bool], delta: f64) -> Result<Certificate> {
    let grid = u.len();
    let (m, rhs) = maximal_on(sp, u);
    let mut cert = Certificate::new(grid, 0.0);
    cert.holds("analytic_spectrum", analytic(sp))
        .lt("rho_to_step", delta, rho(&sp.sample(grid), &phi.sample(grid)?)?)
        .lt("maximal_on_u", delta, m)
        .le("transfer_on_sample", 1.0, sampled_transfer_ratio(sp, &rhs, u, 4));
    Ok(cert)
}

/// Clauses (1), (5), (6), (7) of a (P, Q) pair, plus the Fejer clipping level.
pub fn certify_pair(
    p: &SpecialProduct,
    q: &SpecialProduct,
    psi: &StepFunction,
    u: &[bool],
    a: f64,
    delta: f64,
) -> Result<Certificate> {
    let g = u.len();
    let ps = psi.sample(g)?;
    let qs = q.sample(g);
    let q_sup = q.materialize().sup_norm();
    let mut cert = Certificate::new(g, 0.0);
    cert.holds("analytic_spectrum", analytic(p))
        .lt("maximal_on_u", delta, maximal_on(p, u).0)
        .lt("rho_to_psi", delta, rho(&(&p.sample(g) + &qs), &ps)?)
        .lt("q_sup", a, q_sup)
        .le("fejer_clip", 0.99 * a * (1.0 + 1e-9), q_sup)
        .lt("q_rho_on_u", delta / 4.0, rho_on(&qs, &ps, u)?);
    Ok(cert)
}

/// Clauses (1), (5), (6'), (7') of a U-norm pair; also returns the achieved constant.
#[allow(clippy::too_many_arguments)]
pub fn certify_pair_u(
    p: &SpecialProduct,
    q: &SpecialProduct,
    psi: &StepFunction,
    u: &[bool],
    a: f64,
    gamma: f64,
    delta: f64,
    c_target: f64,
) -> Result<(Certificate, f64)> {
    let g = u.len();
    let ps = psi.sample(g)?;
    let bad = sampling::measure_above(&(&(&p.sample(g) + &q.sample(g)) - &ps), delta);
    let mut cert = Certificate::new(g, 0.0);
    cert.holds("analytic_spectrum", analytic(p))
        .lt("maximal_on_u", delta, maximal_on(p, u).0)
        .lt("bad_measure", c_target * gamma, bad)
        .lt("q_u_norm", a / gamma, u_norm_bound(q));
    Ok((cert, bad / gamma))
}

/// Upper bound for the U-norm of `g . h_[r]`: every symmetric partial sum is a
/// partial sum of the product, so the transfer bound applies.
pub fn u_norm_bound(sp: &SpecialProduct) -> f64 {
    if sp.is_zero() {
        return 0.0;
    }
    let grid = crate::trigpoly::oversampled_grid(sp.g.degree());
    sp.g.sup_norm() * hstar_sup(&sp.h, grid) + 2.0 * sp.g.maximal_sup(grid) * sp.h.coeff_sup()
}

/// Grid set `{|S| < a}`.
pub fn small_set(s: &SampledFunction, a: f64) -> Vec<bool> {
    s.values().iter().map(|v| v.norm() < a).collect()
}

/// Measure of the complement of a grid set.
pub fn complement_measure(u: &[bool]) -> f64 {
    1.0 - measure(u)
}

/// Dyadic grid large enough to resolve a polynomial of this degree.
pub fn grid_for(degree: u64) -> usize {
    dyadic_at_least(2 * degree + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_mean_stays_below_input_sup() {
        let g = 512;
        let s = SampledFunction::from_fn(g, |t| Complex64::new(if t < 2.0 { 0.7 } else { -0.2 }, 0.0)).unwrap();
        for m in [4, 16, 64, 255] {
            let q = fejer_mean(&s, m);
            assert!(q.sup_norm() <= 0.7 + 1e-12, "m = {m}");
        }
    }

    #[test]
    fn zero_inputs_give_zero_outputs() {
        let cfg = ConstructorConfig::default();
        let empty = CircleArc::new(0.0, 0.0).unwrap();
        let b = indicator_polynomial(&empty, 0.25, &cfg).unwrap();
        assert!(b.poly.is_zero() && b.certificate.passed());
        let u = vec![false; 256];
        let zero = StepFunction::constant(Complex64::default());
        let b = step_polynomial(&zero, &u, 0.3, &cfg).unwrap();
        assert!(b.poly.is_zero() && b.certificate.passed());
        let pair = pq_pair(&zero, &u, 0.5, 0.3, &cfg).unwrap();
        assert!(pair.p.is_zero() && pair.q.is_zero() && pair.certificate.passed(), "{}", pair.certificate);
    }

    #[test]
    fn clipping_precondition() {
        let cfg = ConstructorConfig::default();
        let psi = StepFunction::constant(Complex64::new(0.6, 0.0));
        let u = vec![true; 64];
        assert!(matches!(pq_pair(&psi, &u, 0.5, 0.3, &cfg), Err(Error::ClippingInfeasible { .. })));
    }

    #[test]
    fn vanishing_copy_matches_off_u() {
        let s = StepFunction::equal_arcs(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]).unwrap();
        let u: Vec<bool> = (0..64).map(|j| (10..20).contains(&j)).collect();
        let phi = vanish_on(&s, &u).unwrap();
        let (pv, sv) = (phi.sample(64).unwrap(), s.sample(64).unwrap());
        for j in 0..64 {
            let want = if u[j] { Complex64::default() } else { sv.values()[j] };
            assert_eq!(pv.values()[j], want);
        }
    }
}
