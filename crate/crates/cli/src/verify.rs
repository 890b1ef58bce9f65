use std::path::Path;

use plaseries::constructors::{certify_indicator, certify_pair, certify_pair_u, certify_step};
use plaseries::decompose::{verify_round, whole_run_certificate, DecompositionReport, Variant};
use plaseries::synth::verify_flat_contract;
use plaseries::{io, Certificate, CircleArc};
use serde_json::Value;

use crate::config::Config;
use crate::jobs;
use crate::output::{describe, read, CliError};

/// Recomputes the certificate of an artifact directory from its files alone and
/// compares it with the recorded one.
pub fn run(dir: &Path, strict: bool) -> Result<(), CliError> {
    let report: Value = serde_json::from_str(&read(&dir.join("report.json"))?)
        .map_err(|e| CliError::Input(format!("report.json: {e}")))?;
    let kind = report["kind"]
        .as_str()
        .ok_or_else(|| CliError::Input("report.json: missing kind".into()))?;
    let cfg: Config = serde_json::from_value(report["config"].clone())
        .map_err(|e| CliError::Input(format!("report.json config: {e}")))?;
    if let Some(f) = report["failure"].as_str() {
        return Err(CliError::Contract(format!("recorded failure: {f}")));
    }
    let file = |name: &str| read(&dir.join(name));
    let cert = match kind {
        "synth" => verify_flat_contract(&io::read_coeffs(&file("h.csv")?)?, &jobs::synth_problem(&cfg)),
        "indicator" => {
            let ic = &cfg.indicator;
            let sp = io::read_product(&file("product.txt")?)?;
            certify_indicator(&sp, &CircleArc::new(ic.start, ic.length)?, ic.delta, ic.grid)?
        }
        "steppoly" => {
            let sp = io::read_product(&file("product.txt")?)?;
            let phi = io::read_step(&file("phi.csv")?)?;
            let u = jobs::collar_set(&phi, cfg.steppoly.collar, cfg.grid);
            certify_step(&sp, &phi, &u, cfg.steppoly.delta)?
        }
        "pqpair" => {
            let pc = &cfg.pqpair;
            let p = io::read_product(&file("p.txt")?)?;
            let q = io::read_product(&file("q.txt")?)?;
            let psi = io::read_step(&file("psi.csv")?)?;
            let u = jobs::pair_set(&psi, pc.a, cfg.grid)?;
            match pc.gamma {
                None => certify_pair(&p, &q, &psi, &u, pc.a, pc.delta)?,
                Some(gamma) => {
                    certify_pair_u(&p, &q, &psi, &u, pc.a, gamma, pc.delta, cfg.constructor.c_target)?.0
                }
            }
        }
        "decompose" | "menshov" => decomposition(dir, &cfg, kind == "menshov")?,
        "density-demo" => {
            let f = io::read_coeffs(&file("input.csv")?)?;
            jobs::density_certificate(&f, cfg.density.s, &cfg.density.n_list).0
        }
        other => return Err(CliError::Input(format!("unknown artifact kind {other:?}"))),
    };
    if let Some(c) = cert.first_failure() {
        return Err(CliError::Contract(describe(c)));
    }
    compare(&report["certificate"]["clauses"], &cert)?;
    if strict {
        if let Some(c) = cert.strict_failures().first() {
            return Err(CliError::Contract(format!("{} (strict)", describe(c))));
        }
    }
    println!("{kind}: {} clauses verified", cert.clauses.len());
    Ok(())
}

fn decomposition(dir: &Path, cfg: &Config, menshov: bool) -> Result<Certificate, CliError> {
    let f = io::read_samples(&read(&dir.join("f.csv"))?)?;
    let (eps, variant) = if menshov {
        (cfg.menshov.eps, Variant::UNorm { gamma: cfg.menshov.gamma })
    } else {
        (cfg.decompose.eps, Variant::Sup)
    };
    let mut parts = Vec::new();
    for n in 1.. {
        let round = dir.join(format!("round_{n}"));
        if !round.is_dir() {
            break;
        }
        parts.push((
            io::read_step(&read(&round.join("s.csv"))?)?,
            io::read_product(&read(&round.join("p.txt"))?)?,
            io::read_product(&read(&round.join("q.txt"))?)?,
        ));
    }
    let report = DecompositionReport::from_parts(f, eps, variant, parts)?;
    let mut cert = Certificate::new(report.f.grid(), 0.0);
    for n in 1..=report.rounds.len() {
        cert.extend(&format!("round{n}."), &verify_round(&report, n)?);
    }
    cert.extend("run.", &whole_run_certificate(&report));
    Ok(cert)
}

/// Every recomputed clause must appear in the record with the same measured value.
fn compare(recorded: &Value, cert: &Certificate) -> Result<(), CliError> {
    let recorded = recorded
        .as_array()
        .ok_or_else(|| CliError::Input("report.json: missing clauses".into()))?;
    for c in &cert.clauses {
        let stored = recorded
            .iter()
            .find(|r| r["name"] == c.name.as_str())
            .ok_or_else(|| CliError::Contract(format!("clause {} missing from the recorded certificate", c.name)))?;
        let measured = stored["measured"].as_f64();
        if measured.map(f64::to_bits) != Some(c.measured.to_bits()) {
            return Err(CliError::Contract(format!(
                "clause {} recomputes to {:e}, recorded {}",
                c.name, c.measured, stored["measured"]
            )));
        }
    }
    Ok(())
}
