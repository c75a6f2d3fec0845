//! Synthetic chemiresistive sensor-array exposures.
//!
//! Each channel follows first-order adsorption kinetics after flux onset:
//! the resistance approaches `baseline + affinity * conc` with a
//! channel/analyte specific time constant, on top of a linear drift and
//! white Gaussian noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{seconds_to_steps, Dataset, MTSample, DEFAULT_SAMPLE_RATE_HZ};
use crate::error::{Error, Result};

/// Number of built-in randomized array configurations.
pub const N_PRESETS: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorArraySpec {
    pub baselines: Vec<f64>,
    /// `affinity[c][a]`, ohms per percent concentration.
    pub affinity: Vec<Vec<f64>>,
    /// `tau[c][a]`, seconds.
    pub tau: Vec<Vec<f64>>,
    pub noise_sigma: f64,
    pub drift_slope: f64,
}

impl SensorArraySpec {
    pub fn n_channels(&self) -> usize {
        self.baselines.len()
    }

    pub fn n_analytes(&self) -> usize {
        self.affinity.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.n_channels();
        let a = self.n_analytes();
        if k == 0 || a == 0 {
            return Err(Error::arg("sensor array needs at least one channel and analyte"));
        }
        if self.affinity.len() != k || self.tau.len() != k {
            return Err(Error::arg("affinity and tau need one row per channel"));
        }
        if self.affinity.iter().chain(&self.tau).any(|row| row.len() != a) {
            return Err(Error::arg("affinity and tau rows need one entry per analyte"));
        }
        if self.tau.iter().flatten().any(|t| !(*t > 0.0)) {
            return Err(Error::arg("time constants must be positive"));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::arg("noise sigma must be nonnegative"));
        }
        Ok(())
    }

    /// Randomized 8-channel, 4-analyte array; `index` seeds the draw.
    pub fn preset(index: u64) -> Self {
        let (k, a) = (8, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e45_0000 + index);
        let baselines = (0..k).map(|_| rng.random_range(2_000.0..20_000.0)).collect();
        let affinity = (0..k)
            .map(|_| (0..a).map(|_| rng.random_range(-20.0..20.0)).collect())
            .collect();
        let tau = (0..k)
            .map(|_| (0..a).map(|_| rng.random_range(0.2..1.5)).collect())
            .collect();
        SensorArraySpec {
            baselines,
            affinity,
            tau,
            noise_sigma: 50.0,
            drift_slope: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub name: String,
    pub array_spec: SensorArraySpec,
    pub analyte_names: Vec<String>,
    pub positive_analyte: String,
    pub n_train: usize,
    pub n_test: usize,
    pub duration_s: f64,
    pub onset_s: f64,
    pub sample_rate_hz: f64,
    pub concentration_range: [f64; 2],
    pub seed: u64,
}

impl SimConfig {
    /// Built-in configuration `index` (0..11): 100 train / 32 test trials,
    /// 5 s exposures at 20 Hz with flux starting at 1 s.
    pub fn preset(index: u64, seed: u64) -> Self {
        SimConfig {
            name: format!("sim-{index:02}"),
            array_spec: SensorArraySpec::preset(index),
            analyte_names: ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(),
            positive_analyte: "A".into(),
            n_train: 100,
            n_test: 32,
            duration_s: 5.0,
            onset_s: 1.0,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            concentration_range: [10.0, 25.0],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.array_spec.validate()?;
        if self.analyte_names.len() != self.array_spec.n_analytes() {
            return Err(Error::arg("one analyte name per affinity column required"));
        }
        if !self.analyte_names.contains(&self.positive_analyte) {
            return Err(Error::Lookup(self.positive_analyte.clone()));
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::arg("sample counts must be positive"));
        }
        if !(self.onset_s >= 0.0 && self.onset_s < self.duration_s) {
            return Err(Error::arg("onset must fall inside the exposure"));
        }
        let [lo, hi] = self.concentration_range;
        if !(lo >= 0.0 && lo <= hi) {
            return Err(Error::arg("concentration range must satisfy 0 <= lo <= hi"));
        }
        Ok(())
    }
}

/// Resistance matrix (`k x steps`) for one single-analyte exposure.
#[allow(clippy::too_many_arguments)]
pub fn response_curve<R: Rng + ?Sized>(
    spec: &SensorArraySpec,
    analyte: usize,
    conc: f64,
    steps: usize,
    onset: usize,
    rate: f64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if analyte >= spec.n_analytes() {
        return Err(Error::Range(format!("analyte index {analyte}")));
    }
    if !(conc >= 0.0) {
        return Err(Error::arg("concentration must be nonnegative"));
    }
    let noise = if spec.noise_sigma > 0.0 {
        Some(Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::arg(e.to_string()))?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(spec.n_channels());
    for c in 0..spec.n_channels() {
        let amplitude = spec.affinity[c][analyte] * conc;
        let tau_steps = rate * spec.tau[c][analyte];
        let row = (0..steps)
            .map(|t| {
                let mut v = spec.baselines[c] + spec.drift_slope * t as f64 / rate;
                if t >= onset {
                    v += amplitude * (1.0 - (-((t - onset) as f64) / tau_steps).exp());
                }
                if let Some(n) = &noise {
                    v += n.sample(rng);
                }
                v
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

fn draw_split(cfg: &SimConfig, n: usize, stream: u64, tag: &str) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let a = cfg.analyte_names.len();
    let steps = seconds_to_steps(cfg.duration_s, cfg.sample_rate_hz)?;
    let onset = seconds_to_steps(cfg.onset_s, cfg.sample_rate_hz)?.min(steps - 1);
    let mut analytes: Vec<usize> = (0..n).map(|i| i % a).collect();
    analytes.shuffle(&mut rng);
    let [lo, hi] = cfg.concentration_range;
    let mut samples = Vec::with_capacity(n);
    for (i, &analyte) in analytes.iter().enumerate() {
        let conc = if hi > lo { rng.random_range(lo..hi) } else { lo };
        let channels = response_curve(&cfg.array_spec, analyte, conc, steps, onset, cfg.sample_rate_hz, &mut rng)?;
        let mut concentrations = vec![0.0; a];
        concentrations[analyte] = conc;
        samples.push(MTSample {
            id: format!("{tag}-{i:04}"),
            channels,
            sample_rate: cfg.sample_rate_hz,
            onset_index: onset,
            concentrations,
        });
    }
    Dataset::new(
        format!("{}-{tag}", cfg.name),
        cfg.analyte_names.clone(),
        samples,
        cfg.positive_analyte.clone(),
    )
}

/// Train and test sets drawn from disjoint random streams of `cfg.seed`.
/// Analytes are dealt round-robin and shuffled, so each analyte's share is
/// within one sample of `n / A`.
pub fn generate_dataset(cfg: &SimConfig) -> Result<(Dataset, Dataset)> {
    cfg.validate()?;
    let train = draw_split(cfg, cfg.n_train, 0, "train")?;
    let test = draw_split(cfg, cfg.n_test, 1, "test")?;
    Ok((train, test))
}
