//! Iterative decomposition `f = sum (P_n + Q_n)` of a sampled function.
//!
//! Round `n` approximates the residual by a step function `S_n`, takes
//! `U_n = {|S_n| < eps 2^-n}` and splits `S_n` with a (P, Q) pair. Every round
//! carries its own certificate; the run stops at the first round that cannot
//! be certified.

use num_complex::Complex64;

use crate::certificate::Certificate;
use crate::constructors::{complement_measure, pq_pair, pq_pair_u, small_set, u_norm_bound, ConstructorConfig, PqPair};
use crate::sampling::{measure, rho, step_approximate, SampledFunction, StepFunction};
use crate::trigpoly::{SpecialProduct, TrigPoly};
use crate::{Error, Result};

/// Which pair lemma drives the rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// `||Q_n||_inf < eps 2^-n`.
    Sup,
    /// `||Q_n||_U < eps 2^-n`, with the given `gamma`.
    UNorm { gamma: f64 },
}

#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub n: u32,
    pub s: StepFunction,
    /// `U_n` on the report grid.
    pub u: Vec<bool>,
    pub u_complement: f64,
    pub p: SpecialProduct,
    pub q: SpecialProduct,
    /// `rho(f, sum_{k <= n} (P_k + Q_k))`.
    pub residual_rho: f64,
    /// `||Q_n||_inf`, or the certified U-norm bound.
    pub q_norm: f64,
    pub certificate: Certificate,
    /// Convergence diagnostics that do not gate the round.
    pub diagnostics: Certificate,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub f: SampledFunction,
    pub eps: f64,
    pub variant: Variant,
    pub rounds: Vec<RoundRecord>,
    /// The round that could not be certified, if any.
    pub failure: Option<Error>,
    /// Whole-run clauses over the completed rounds.
    pub certificate: Certificate,
}

impl DecompositionReport {
    pub fn completed(&self) -> usize {
        self.rounds.len()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.failure.clone() {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }

    /// Report skeleton from stored artifacts: `(S_n, P_n, Q_n)` for rounds `1, 2, ...`.
    /// `U_n` is recomputed from `S_n`; certificates are left empty.
    pub fn from_parts(
        f: SampledFunction,
        eps: f64,
        variant: Variant,
        parts: Vec<(StepFunction, SpecialProduct, SpecialProduct)>,
    ) -> Result<Self> {
        let g = f.grid();
        let mut rounds = Vec::new();
        for (i, (s, p, q)) in parts.into_iter().enumerate() {
            let n = i as u32 + 1;
            let u = small_set(&s.sample(g)?, eps * half(n));
            rounds.push(RoundRecord {
                n,
                u_complement: complement_measure(&u),
                u,
                s,
                p,
                q,
                residual_rho: f64::NAN,
                q_norm: f64::NAN,
                certificate: Certificate::new(g, 0.0),
                diagnostics: Certificate::new(g, 0.0),
            });
        }
        Ok(DecompositionReport {
            f,
            eps,
            variant,
            rounds,
            failure: None,
            certificate: Certificate::new(g, 0.0),
        })
    }

    /// `sum_{k <= n} (P_k + Q_k)` on the report grid.
    pub fn partial_sum(&self, n: usize) -> SampledFunction {
        let g = self.f.grid();
        self.rounds[..n].iter().fold(SampledFunction::zeros(g).expect("dyadic grid"), |acc, r| {
            &(&acc + &r.p.sample(g)) + &r.q.sample(g)
        })
    }
}

/// Decomposition with uniformly small `Q_n`.
pub fn pla_decompose(f: &SampledFunction, eps: f64, rounds: u32, cfg: &ConstructorConfig) -> DecompositionReport {
    decompose(f, eps, rounds, Variant::Sup, cfg)
}

/// Decomposition with `Q_n` small in the U-norm.
pub fn menshov_decompose(
    f: &SampledFunction,
    eps: f64,
    gamma: f64,
    rounds: u32,
    cfg: &ConstructorConfig,
) -> DecompositionReport {
    decompose(f, eps, rounds, Variant::UNorm { gamma }, cfg)
}

fn quarter(n: u32) -> f64 {
    0.25f64.powi(n as i32)
}

fn half(n: u32) -> f64 {
    0.5f64.powi(n as i32)
}

fn decompose(f: &SampledFunction, eps: f64, rounds: u32, variant: Variant, cfg: &ConstructorConfig) -> DecompositionReport {
    let g = f.grid();
    let mut report = DecompositionReport {
        f: f.clone(),
        eps,
        variant,
        rounds: Vec::new(),
        failure: None,
        certificate: Certificate::new(g, 0.0),
    };
    if !(eps > 0.0 && eps < 1.0) {
        report.failure = Some(Error::InvalidEpsilon(eps));
        return report;
    }
    let mut residual = f.clone();
    for n in 1..=rounds {
        match round(f, &residual, eps, n, variant, &report.rounds, cfg) {
            Ok(rec) => {
                residual = &(&residual - &rec.p.sample(g)) - &rec.q.sample(g);
                let failed = rec.certificate.first_failure().map(|c| c.name.clone());
                report.rounds.push(rec);
                if let Some(clause) = failed {
                    report.failure = Some(Error::RoundInfeasible {
                        round: n as usize,
                        clause,
                        detail: "certificate clause failed".into(),
                    });
                    break;
                }
            }
            Err(e) => {
                report.failure = Some(e);
                break;
            }
        }
    }
    report.certificate = whole_run_certificate(&report);
    report
}

fn infeasible(n: u32, clause: &str, e: Error) -> Error {
    Error::RoundInfeasible {
        round: n as usize,
        clause: clause.into(),
        detail: e.to_string(),
    }
}

fn round(
    f: &SampledFunction,
    residual: &SampledFunction,
    eps: f64,
    n: u32,
    variant: Variant,
    done: &[RoundRecord],
    cfg: &ConstructorConfig,
) -> Result<RoundRecord> {
    let g = f.grid();
    let zero = SampledFunction::zeros(g)?;
    let target = quarter(n) / 2.0;
    let s = if rho(residual, &zero)? < target {
        StepFunction::constant(Complex64::default())
    } else {
        step_approximate(residual, target).map_err(|e| infeasible(n, "step_approximation", e))?
    };
    let sv = s.sample(g)?;
    let a = eps * half(n);
    let u = small_set(&sv, a);
    let budget = 0.9 * (quarter(n) - rho(&sv, residual)?);
    let pair: PqPair = match variant {
        Variant::Sup => pq_pair(&s, &u, a, budget, cfg),
        Variant::UNorm { gamma } => pq_pair_u(&s, &u, a * gamma, gamma, budget, cfg),
    }
    .map_err(|e| infeasible(n, "pq_pair", e))?;

    let mut rec = RoundRecord {
        n,
        s,
        u_complement: complement_measure(&u),
        u,
        p: pair.p,
        q: pair.q,
        residual_rho: 0.0,
        q_norm: 0.0,
        certificate: Certificate::new(g, 0.0),
        diagnostics: Certificate::new(g, 0.0),
    };
    let mut all: Vec<RoundRecord> = done.to_vec();
    all.push(rec.clone());
    let cert = round_certificate(f, eps, variant, &all, n as usize, Some(&pair.certificate));
    let mpu = pair.certificate.clause("maximal_on_u").map_or(0.0, |c| c.measured);
    // Outside U_n the maximal function is unconstrained.
    rec.diagnostics
        .lt("maximal_on_u", quarter(n), mpu)
        .lt("maximal_total", half(n), mpu + rec.u_complement);
    if let Some(c) = pair.achieved_c {
        rec.diagnostics.le("achieved_c", cfg.c_target, c);
    }
    rec.residual_rho = cert.clause("residual_rho").map_or(f64::NAN, |c| c.measured);
    rec.q_norm = cert.clause("q_norm").map_or(f64::NAN, |c| c.measured);
    rec.certificate = cert;
    Ok(rec)
}

/// Clauses of round `n`, recomputed from the stored polynomials.
fn round_certificate(
    f: &SampledFunction,
    eps: f64,
    variant: Variant,
    rounds: &[RoundRecord],
    n: usize,
    pair: Option<&Certificate>,
) -> Certificate {
    let g = f.grid();
    let rec = &rounds[n - 1];
    let k = rec.n;
    let sum = rounds[..n].iter().fold(SampledFunction::zeros(g).expect("dyadic grid"), |acc, r| {
        &(&acc + &r.p.sample(g)) + &r.q.sample(g)
    });
    let mut cert = Certificate::new(g, 0.0);
    cert.lt("residual_rho", quarter(k), rho(f, &sum).unwrap_or(f64::INFINITY))
        .holds("analytic_spectrum", rec.p.lo().map_or(true, |lo| lo >= 0));
    match variant {
        Variant::Sup => {
            cert.lt("q_norm", eps * half(k), q_sup(&rec.q));
        }
        Variant::UNorm { .. } => {
            let bound = pair
                .and_then(|c| c.clause("q_u_norm"))
                .map_or_else(|| u_norm_bound(&rec.q), |c| c.measured);
            cert.lt("q_norm", eps * half(k), bound);
        }
    }
    if eps * half(k) < quarter(k) * 4.0 {
        cert.lt("u_complement", quarter(k) * 16.0, 1.0 - measure(&rec.u));
    }
    if let Some(pc) = pair {
        cert.extend("pair.", pc);
    }
    cert
}

fn q_sup(q: &SpecialProduct) -> f64 {
    if q.h == TrigPoly::one() {
        q.g.sup_norm()
    } else {
        q.materialize().sup_norm()
    }
}

/// Re-checks the residual, spectrum and `Q`-size clauses of round `n` from the
/// stored polynomials alone.
pub fn verify_round(report: &DecompositionReport, n: usize) -> Result<Certificate> {
    if n == 0 || n > report.rounds.len() {
        return Err(Error::InvalidParams(format!(
            "round {n} not in report with {} rounds",
            report.rounds.len()
        )));
    }
    Ok(round_certificate(
        &report.f,
        report.eps,
        report.variant,
        &report.rounds,
        n,
        None,
    ))
}

/// Bound on the sum of all correctors, recomputed from the stored polynomials.
pub fn whole_run_certificate(report: &DecompositionReport) -> Certificate {
    let mut cert = Certificate::new(report.f.grid(), 0.0);
    match report.variant {
        Variant::Sup => {
            let total = report.rounds.iter().fold(TrigPoly::zero(), |acc, r| acc.add(&r.q.g));
            cert.lt("total_q_sup", report.eps, total.sup_norm());
        }
        Variant::UNorm { .. } => {
            let total: f64 = report.rounds.iter().map(|r| u_norm_bound(&r.q)).sum();
            cert.lt("total_q_u_norm", report.eps, total);
        }
    }
    cert
}
