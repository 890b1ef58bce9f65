use std::path::Path;

use num_complex::Complex64;
use plaseries::constructors::{indicator_polynomial, pq_pair, pq_pair_u, small_set, step_polynomial};
use plaseries::decompose::{menshov_decompose, pla_decompose, DecompositionReport};
use plaseries::density::{modulated_average, modulated_average_at, sup_error, tail_bound};
use plaseries::synth::{solve_problem, SynthesisProblem};
use plaseries::{io, Certificate, CircleArc, SampledFunction, StepFunction, TrigPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Config, SpectrumKind};
use crate::output::{read, Artifacts, CliError, Outcome};

const HALF_INDICATOR: &str = include_str!("../data/half_indicator.csv");

fn step_input(path: Option<&Path>, fallback: impl FnOnce() -> StepFunction) -> Result<StepFunction, CliError> {
    match path {
        Some(p) => Ok(io::read_step(&read(p)?)?),
        None => Ok(fallback()),
    }
}

pub fn half_indicator() -> StepFunction {
    io::read_step(HALF_INDICATOR).expect("bundled target parses")
}

pub fn steppoly_target(cfg: &Config) -> Result<StepFunction, CliError> {
    step_input(cfg.steppoly.input.as_deref(), half_indicator)
}

pub fn pqpair_target(cfg: &Config) -> Result<StepFunction, CliError> {
    step_input(cfg.pqpair.input.as_deref(), || {
        StepFunction::new(vec![1.0, 2.0], vec![Complex64::new(0.2, 0.0), Complex64::default()]).expect("valid step")
    })
}

/// Nodes at distance at least `collar` from every arc where `phi` is nonzero.
pub fn collar_set(phi: &StepFunction, collar: f64, grid: usize) -> Vec<bool> {
    let mut u = vec![true; grid];
    for (arc, v) in phi.arcs() {
        if v.norm() > 0.0 {
            for (x, keep) in u.iter_mut().zip(arc.outside_neighbourhood(collar, grid)) {
                *x &= keep;
            }
        }
    }
    u
}

/// `{|psi| < a}` on the grid.
pub fn pair_set(psi: &StepFunction, a: f64, grid: usize) -> Result<Vec<bool>, CliError> {
    Ok(small_set(&psi.sample(grid)?, a))
}

pub fn decompose_input(input: Option<&Path>, grid: usize) -> Result<SampledFunction, CliError> {
    match input {
        Some(p) => Ok(io::read_samples(&read(p)?)?),
        None => Ok(half_indicator().sample(grid)?),
    }
}

/// Smooth polynomial with `c(s) = 1` and Fejer-damped random coefficients elsewhere.
pub fn density_input(cfg: &Config) -> Result<TrigPoly, CliError> {
    if let Some(p) = &cfg.density.input {
        return Ok(io::read_coeffs(&read(p)?)?);
    }
    let (s, m) = (cfg.density.s, cfg.density.degree);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(TrigPoly::from_terms((-m..=m).map(|n| {
        let w = 1.0 - n.abs() as f64 / (m + 1) as f64;
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (0.5 * w);
        (n, if n == s { Complex64::new(1.0, 0.0) } else { c })
    })))
}

pub fn synth(cfg: &Config, out: &Path) -> Result<Outcome, CliError> {
    let art = Artifacts::new(out)?;
    let problem = synth_problem(cfg);
    let (cert, failure, summary) = match solve_problem(&problem) {
        Ok(flat) => {
            art.write("h.csv", &io::write_coeffs(&flat.h))?;
            let summary = json!({
                "degree": flat.degree,
                "nonzero": flat.h.nnz(),
                "iterations": flat.iterations,
                "exceptional_measure": flat.exceptional_measure,
                "monotone_residual": flat.monotone,
            });
            (flat.certificate, None, summary)
        }
        Err(e @ plaseries::Error::Parse(_)) => return Err(e.into()),
        Err(e) => (Certificate::new(0, 0.0), Some(e.to_string()), Value::Null),
    };
    art.report("synth", cfg, &cert, failure.as_deref(), summary)?;
    Ok(Outcome { certificate: cert, failure })
}

pub fn synth_problem(cfg: &Config) -> SynthesisProblem {
    let s = &cfg.synth;
    let mut p = match s.spectrum {
        SpectrumKind::Analytic => SynthesisProblem::analytic(s.eps, s.budget, cfg.seed),
        SpectrumKind::Bilateral => SynthesisProblem::bilateral(s.gamma, s.delta, s.c_target, s.budget, cfg.seed),
    };
    p.arcs = s.arcs;
    p.max_iters = s.max_iters;
    p
}

pub fn indicator(cfg: &Config, out: &Path) -> Result<Outcome, CliError> {
    let art = Artifacts::new(out)?;
    let ic = &cfg.indicator;
    let arc = CircleArc::new(ic.start, ic.length)?;
    let built = match indicator_polynomial(&arc, ic.delta, &cfg.constructor()) {
        Ok(b) => b,
        Err(e) => return failed(&art, "indicator", cfg, e),
    };
    art.write("product.txt", &io::write_product(&built.poly))?;
    let summary = json!({
        "degree": built.poly.degree(),
        "g_nonzero": built.poly.g.nnz(),
        "h_nonzero": built.poly.h.nnz(),
        "r": built.poly.r,
        "order": built.info.as_ref().map(|i| i.order),
        "hstar_sup": built.info.as_ref().map(|i| i.hstar),
    });
    art.report("indicator", cfg, &built.certificate, None, summary)?;
    Ok(Outcome {
        certificate: built.certificate,
        failure: None,
    })
}

fn failed(art: &Artifacts, kind: &str, cfg: &Config, e: plaseries::Error) -> Result<Outcome, CliError> {
    if let plaseries::Error::Parse(_) = e {
        return Err(e.into());
    }
    let cert = Certificate::new(0, 0.0);
    let msg = e.to_string();
    art.report(kind, cfg, &cert, Some(&msg), Value::Null)?;
    Ok(Outcome {
        certificate: cert,
        failure: Some(msg),
    })
}

pub fn steppoly(cfg: &Config, out: &Path) -> Result<Outcome, CliError> {
    let art = Artifacts::new(out)?;
    let phi = steppoly_target(cfg)?;
    let u = collar_set(&phi, cfg.steppoly.collar, cfg.grid);
    art.write("phi.csv", &io::write_step(&phi))?;
    let built = match step_polynomial(&phi, &u, cfg.steppoly.delta, &cfg.constructor()) {
        Ok(b) => b,
        Err(e) => return failed(&art, "steppoly", cfg, e),
    };
    art.write("product.txt", &io::write_product(&built.poly))?;
    let summary = json!({
        "degree": built.poly.degree(),
        "r": built.poly.r,
        "u_measure": plaseries::sampling::measure(&u),
    });
    art.report("steppoly", cfg, &built.certificate, None, summary)?;
    Ok(Outcome {
        certificate: built.certificate,
        failure: None,
    })
}

pub fn pqpair(cfg: &Config, out: &Path) -> Result<Outcome, CliError> {
    let art = Artifacts::new(out)?;
    let pc = &cfg.pqpair;
    let psi = pqpair_target(cfg)?;
    let u = pair_set(&psi, pc.a, cfg.grid)?;
    art.write("psi.csv", &io::write_step(&psi))?;
    let ccfg = cfg.constructor();
    let pair = match pc.gamma {
        None => pq_pair(&psi, &u, pc.a, pc.delta, &ccfg),
        Some(gamma) => pq_pair_u(&psi, &u, pc.a, gamma, pc.delta, &ccfg),
    };
    let pair = match pair {
        Ok(p) => p,
        Err(e) => return failed(&art, "pqpair", cfg, e),
    };
    art.write("p.txt", &io::write_product(&pair.p))?;
    art.write("q.txt", &io::write_product(&pair.q))?;
    art.write("phi.csv", &io::write_step(&pair.phi))?;
    let summary = json!({
        "p_degree": pair.p.degree(),
        "q_degree": pair.q.degree(),
        "achieved_c": pair.achieved_c,
    });
    art.report("pqpair", cfg, &pair.certificate, None, summary)?;
    Ok(Outcome {
        certificate: pair.certificate,
        failure: None,
    })
}

pub fn decompose(cfg: &Config, out: &Path, menshov: bool) -> Result<Outcome, CliError> {
    let art = Artifacts::new(out)?;
    let (input, kind) = if menshov {
        (cfg.menshov.input.as_deref(), "menshov")
    } else {
        (cfg.decompose.input.as_deref(), "decompose")
    };
    let f = decompose_input(input, cfg.grid)?;
    let ccfg = cfg.constructor();
    let report = if menshov {
        let m = &cfg.menshov;
        menshov_decompose(&f, m.eps, m.gamma, m.rounds, &ccfg)
    } else {
        pla_decompose(&f, cfg.decompose.eps, cfg.decompose.rounds, &ccfg)
    };
    art.write("f.csv", &io::write_samples(&f))?;
    let mut metrics = String::from("n,residual_rho,residual_bound,q_norm,q_bound,u_complement,p_degree,q_degree,passed\n");
    for r in &report.rounds {
        let dir = format!("round_{}", r.n);
        art.write(&format!("{dir}/s.csv"), &io::write_step(&r.s))?;
        art.write(&format!("{dir}/p.txt"), &io::write_product(&r.p))?;
        art.write(&format!("{dir}/q.txt"), &io::write_product(&r.q))?;
        art.write(&format!("{dir}/certificate.txt"), &r.certificate.to_string())?;
        art.write(&format!("{dir}/diagnostics.txt"), &r.diagnostics.to_string())?;
        let bound = |name: &str| r.certificate.clause(name).map_or(f64::NAN, |c| c.bound);
        metrics.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{},{},{}\n",
            r.n,
            r.residual_rho,
            bound("residual_rho"),
            r.q_norm,
            bound("q_norm"),
            r.u_complement,
            r.p.degree(),
            r.q.degree(),
            r.certificate.passed()
        ));
    }
    art.write("rounds.csv", &metrics)?;
    let cert = run_certificate(&report);
    let failure = report.failure.as_ref().map(|e| e.to_string());
    let summary = json!({
        "rounds_requested": if menshov { cfg.menshov.rounds } else { cfg.decompose.rounds },
        "rounds_completed": report.completed(),
        "rounds": report.rounds.iter().map(|r| json!({
            "n": r.n,
            "s_arcs": r.s.len(),
            "residual_rho": r.residual_rho,
            "q_norm": r.q_norm,
            "u_complement": r.u_complement,
            "p_degree": r.p.degree(),
            "q_degree": r.q.degree(),
            "diagnostics": crate::output::certificate_json(&r.diagnostics),
        })).collect::<Vec<_>>(),
    });
    art.report(kind, cfg, &cert, failure.as_deref(), summary)?;
    Ok(Outcome { certificate: cert, failure })
}

/// Round certificates under `round<n>.` followed by the whole-run clauses.
pub fn run_certificate(report: &DecompositionReport) -> Certificate {
    let mut cert = Certificate::new(report.f.grid(), 0.0);
    for r in &report.rounds {
        cert.extend(&format!("round{}.", r.n), &r.certificate);
    }
    cert.extend("run.", &report.certificate);
    cert
}

pub fn density(cfg: &Config, out: &Path) -> Result<Outcome, CliError> {
    let art = Artifacts::new(out)?;
    let f = density_input(cfg)?;
    art.write("input.csv", &io::write_coeffs(&f))?;
    let (cert, csv) = density_certificate(&f, cfg.density.s, &cfg.density.n_list);
    art.write("errors.csv", &csv)?;
    art.report("density-demo", cfg, &cert, None, json!({ "degree": f.degree() }))?;
    Ok(Outcome {
        certificate: cert,
        failure: None,
    })
}

/// Per `N`: the filter agrees with direct summation, and the error is within the tail bound.
pub fn density_certificate(f: &TrigPoly, s: i64, ns: &[u64]) -> (Certificate, String) {
    let mut cert = Certificate::new(0, 0.0);
    let mut csv = String::from("N,sup_error,tail_bound\n");
    for &n in ns {
        let filtered = modulated_average(f, s, n);
        let agree = (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * (k as f64 + 0.37) / 64.0;
                (filtered.eval(t) - modulated_average_at(f, s, n, t)).norm()
            })
            .fold(0.0, f64::max);
        let (err, tail) = (sup_error(f, s, n), tail_bound(f, s, n));
        cert.le(&format!("direct_sum_N{n}"), 1e-12, agree)
            .le(&format!("tail_bound_N{n}"), tail * (1.0 + 1e-12) + 1e-15, err);
        csv.push_str(&format!("{n},{err:e},{tail:e}\n"));
    }
    (cert, csv)
}
