use std::path::PathBuf;

use plaseries::constructors::ConstructorConfig;
use plaseries::synth::SynthConfig;
use serde::{Deserialize, Serialize};

/// Fully resolved run configuration. Every numeric knob lives here and is
/// echoed into each report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Sampling grid for step functions, sets and decompositions.
    pub grid: usize,
    pub synth: SynthSection,
    pub constructor: ConstructorSection,
    pub indicator: IndicatorSection,
    pub steppoly: StepSection,
    pub pqpair: PairSection,
    pub decompose: DecomposeSection,
    pub menshov: MenshovSection,
    pub density: DensitySection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            grid: 4096,
            synth: SynthSection::default(),
            constructor: ConstructorSection::default(),
            indicator: IndicatorSection::default(),
            steppoly: StepSection::default(),
            pqpair: PairSection::default(),
            decompose: DecomposeSection::default(),
            menshov: MenshovSection::default(),
            density: DensitySection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Analytic,
    Bilateral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub spectrum: SpectrumKind,
    pub eps: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c_target: f64,
    pub budget: usize,
    pub arcs: usize,
    pub max_iters: usize,
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection {
            spectrum: SpectrumKind::Analytic,
            eps: 0.5,
            gamma: 0.5,
            delta: 0.5,
            c_target: 4.0,
            budget: 4096,
            arcs: 64,
            max_iters: 1200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructorSection {
    pub flat_budget: usize,
    pub flat_start_degree: usize,
    pub flat_arcs: usize,
    pub flat_ap_iters: usize,
    pub flat_dr_iters: usize,
    pub max_order: u64,
    pub bilateral_budget: usize,
    pub bilateral_delta_ratio: f64,
    pub c_target: f64,
}

impl Default for ConstructorSection {
    fn default() -> Self {
        let c = ConstructorConfig::default();
        ConstructorSection {
            flat_budget: c.synth.budget,
            flat_start_degree: c.synth.start_degree,
            flat_arcs: c.synth.arcs,
            flat_ap_iters: c.synth.ap_iters,
            flat_dr_iters: c.synth.dr_iters,
            max_order: c.max_order,
            bilateral_budget: c.bilateral_budget,
            bilateral_delta_ratio: c.bilateral_delta_ratio,
            c_target: c.c_target,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndicatorSection {
    pub start: f64,
    pub length: f64,
    pub delta: f64,
    /// Certificate grid; finer than the global grid so the ramps are resolved.
    pub grid: usize,
}

impl Default for IndicatorSection {
    fn default() -> Self {
        IndicatorSection {
            start: 0.0,
            length: std::f64::consts::FRAC_PI_2,
            delta: 0.25,
            grid: 32768,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepSection {
    /// Step-function file; the bundled half-circle indicator when absent.
    pub input: Option<PathBuf>,
    pub delta: f64,
    /// `U` is the set of nodes at least this far from the support.
    pub collar: f64,
}

impl Default for StepSection {
    fn default() -> Self {
        StepSection {
            input: None,
            delta: 0.3,
            collar: 0.3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairSection {
    /// Step-function file; `0.2` on `[1, 2)` when absent.
    pub input: Option<PathBuf>,
    pub a: f64,
    pub delta: f64,
    /// Use the U-norm variant with this `gamma`.
    pub gamma: Option<f64>,
}

impl Default for PairSection {
    fn default() -> Self {
        PairSection {
            input: None,
            a: 0.5,
            delta: 0.3,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeSection {
    /// Sample file (`j,re,im`); the bundled step target sampled on `grid` when absent.
    pub input: Option<PathBuf>,
    pub eps: f64,
    pub rounds: u32,
}

impl Default for DecomposeSection {
    fn default() -> Self {
        DecomposeSection {
            input: None,
            eps: 0.25,
            rounds: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MenshovSection {
    pub input: Option<PathBuf>,
    pub eps: f64,
    pub gamma: f64,
    pub rounds: u32,
}

impl Default for MenshovSection {
    fn default() -> Self {
        MenshovSection {
            input: None,
            eps: 0.25,
            gamma: 0.5,
            rounds: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensitySection {
    /// Coefficient file; a seeded smooth polynomial with `c(s) = 1` when absent.
    pub input: Option<PathBuf>,
    pub s: i64,
    pub n_list: Vec<u64>,
    /// Degree of the generated polynomial.
    pub degree: i64,
}

impl Default for DensitySection {
    fn default() -> Self {
        DensitySection {
            input: None,
            s: -3,
            n_list: vec![8, 16, 32, 64],
            degree: 128,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn constructor(&self) -> ConstructorConfig {
        let c = &self.constructor;
        ConstructorConfig {
            synth: SynthConfig {
                start_degree: c.flat_start_degree,
                budget: c.flat_budget,
                arcs: c.flat_arcs,
                ap_iters: c.flat_ap_iters,
                dr_iters: c.flat_dr_iters,
                seed: self.seed,
                ..SynthConfig::default()
            },
            grid: self.indicator.grid,
            max_order: c.max_order,
            bilateral_budget: c.bilateral_budget,
            bilateral_delta_ratio: c.bilateral_delta_ratio,
            c_target: c.c_target,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let c = Config::parse("seed = 3\n[decompose]\nrounds = 2\n").unwrap();
        assert_eq!((c.seed, c.decompose.rounds, c.decompose.eps), (3, 2, 0.25));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("[decompose]\nround = 2\n").is_err());
        assert!(Config::parse("grid = \"big\"").is_err());
    }
}
