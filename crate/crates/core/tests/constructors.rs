use std::f64::consts::PI;

use num_complex::Complex64;
use plaseries::constructors::*;
use plaseries::{CircleArc, StepFunction};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Nodes at distance at least `collar` from the support `[start, start + len)`.
fn away_from(arc: &CircleArc, collar: f64, g: usize) -> Vec<bool> {
    arc.outside_neighbourhood(collar, g)
}

#[test]
fn half_circle_step_polynomial() {
    let cfg = ConstructorConfig::default();
    let phi = StepFunction::new(vec![0.0, PI], vec![c(1.0), c(0.0)]).unwrap();
    let arc = CircleArc::new(0.0, PI).unwrap();
    let u = away_from(&arc, 0.3, 4096);
    let built = step_polynomial(&phi, &u, 0.3, &cfg).unwrap();
    println!("{}", built.certificate);
    assert!(built.certificate.passed());
    assert!(built.poly.lo().unwrap() >= 0);
}

#[test]
fn signed_two_arc_step_polynomial() {
    let cfg = ConstructorConfig::default();
    let phi = StepFunction::new(vec![0.0, 1.0, 2.0, 3.0], vec![c(1.0), c(0.0), c(-1.0), c(0.0)]).unwrap();
    let u: Vec<bool> = (0..4096)
        .map(|j| {
            let t = plaseries::grid::node(j, 4096);
            t > 3.6 || (1.4..1.6).contains(&t)
        })
        .collect();
    let built = step_polynomial(&phi, &u, 0.4, &cfg).unwrap();
    println!("{}", built.certificate);
    assert!(built.certificate.clause("rho_to_step").unwrap().pass);
    assert!(built.certificate.passed());
}

#[test]
fn pair_for_small_arc_inside_u() {
    let cfg = ConstructorConfig::default();
    let psi = StepFunction::new(vec![1.0, 2.0], vec![c(0.2), c(0.0)]).unwrap();
    let u: Vec<bool> = (0..4096).map(|j| plaseries::grid::node(j, 4096) < 3.0).collect();
    let pair = pq_pair(&psi, &u, 0.5, 0.3, &cfg).unwrap();
    println!("{}", pair.certificate);
    assert!(pair.certificate.passed());
    assert!(pair.q.g.sup_norm() <= 0.99 * 0.5 + 1e-12);
    let again = certify_pair(&pair.p, &pair.q, &psi, &u, 0.5, 0.3).unwrap();
    assert!(again.passed());
}

#[test]
fn u_norm_pair_reports_constant() {
    let cfg = ConstructorConfig::default();
    let psi = StepFunction::new(vec![1.0, 2.0], vec![c(0.2), c(0.0)]).unwrap();
    let u: Vec<bool> = (0..4096).map(|j| plaseries::grid::node(j, 4096) < 3.0).collect();
    let pair = pq_pair_u(&psi, &u, 0.5, 0.5, 0.3, &cfg).unwrap();
    println!("{}\nC = {:?}", pair.certificate, pair.achieved_c);
    assert!(pair.certificate.passed());
    let c_hat = pair.achieved_c.unwrap();
    assert!(c_hat <= cfg.c_target);
    assert!(u_norm_bound(&pair.q) < 0.5 / 0.5);
}

#[test]
fn zero_u_norm_pair() {
    let cfg = ConstructorConfig::default();
    let zero = StepFunction::constant(Complex64::default());
    let u = vec![true; 512];
    let pair = pq_pair_u(&zero, &u, 0.5, 0.5, 0.3, &cfg).unwrap();
    assert!(pair.p.is_zero() && pair.q.is_zero() && pair.certificate.passed());
}
