//! Uniform circle grids and the transforms between coefficients and samples.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

pub fn check_dyadic(g: usize) -> Result<()> {
    if g >= 8 && g.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::BadGrid(g))
    }
}

/// Smallest power of two that is at least `n` and at least 8.
pub fn dyadic_at_least(n: u64) -> usize {
    (n.max(8) as usize).next_power_of_two()
}

#[inline]
pub fn node(j: usize, g: usize) -> f64 {
    TAU * j as f64 / g as f64
}

/// `e^{2 pi i k / g}` for `k = 0..g`.
pub fn twiddles(g: usize) -> Vec<Complex64> {
    (0..g).map(|k| Complex64::from_polar(1.0, node(k, g))).collect()
}

/// Circular distance between two angles.
pub fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Forward and inverse plans of one size, reused across iterations.
pub struct Transform {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transform {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Bins `b[k]` (frequency `k mod n`) to samples `sum_k b[k] e^{i k t_j}`.
    pub fn to_values(&self, bins: &mut [Complex64]) {
        self.inv.process(bins);
    }

    /// Samples to bins, normalised so that `to_values` inverts it.
    pub fn to_bins(&self, values: &mut [Complex64]) {
        self.fwd.process(values);
        let s = 1.0 / self.n as f64;
        values.iter_mut().for_each(|v| *v *= s);
    }
}

/// Exact grid values of `sum c(n) e^{int}` at `t_j = 2 pi j / g` for any degree,
/// by folding frequencies modulo `g`.
pub fn sample_terms<'a>(terms: impl Iterator<Item = (&'a i64, &'a Complex64)>, g: usize) -> Vec<Complex64> {
    let mut bins = vec![Complex64::new(0.0, 0.0); g];
    for (&n, &c) in terms {
        bins[n.rem_euclid(g as i64) as usize] += c;
    }
    Transform::new(g).to_values(&mut bins);
    bins
}
