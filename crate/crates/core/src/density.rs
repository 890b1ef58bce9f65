//! Modulated translate averages `F_{N,s}(t) = (1/N) sum_j f(t - 2 pi j / N) e^{i s 2 pi j / N}`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::trigpoly::TrigPoly;

/// `F_{N,s}` as a polynomial: the frequencies of `f` congruent to `s` mod `N`.
pub fn modulated_average(f: &TrigPoly, s: i64, n: u64) -> TrigPoly {
    assert!(n >= 2, "need at least two translates");
    let n = n as i64;
    f.filter(|k| (k - s).rem_euclid(n) == 0)
}

/// `F_{N,s}(t)` by summing the `N` translates directly.
pub fn modulated_average_at(f: &TrigPoly, s: i64, n: u64, t: f64) -> Complex64 {
    let step = TAU / n as f64;
    (0..n)
        .map(|j| {
            let u = step * j as f64;
            f.eval(t - u) * Complex64::from_polar(1.0, s as f64 * u)
        })
        .sum::<Complex64>()
        / n as f64
}

/// `sum |c(k)|` over `k = s mod N`, `k != s`: bounds `sup |F_{N,s} - c(s) e^{ist}|`.
pub fn tail_bound(f: &TrigPoly, s: i64, n: u64) -> f64 {
    modulated_average(f, s, n).terms().filter(|&(k, _)| k != s).map(|(_, c)| c.norm()).sum()
}

/// `sup |F_{N,s} - c(s) e^{ist}|` on an oversampled grid.
pub fn sup_error(f: &TrigPoly, s: i64, n: u64) -> f64 {
    let filtered = modulated_average(f, s, n);
    filtered.filter(|k| k != s).sup_norm()
}
