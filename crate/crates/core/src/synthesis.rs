//! Exact synthesis of fractional Gaussian noise and fractional Brownian motion.
//!
//! The default generator is circulant embedding of the fGn autocovariance
//! (Davies-Harte). The Durbin-Levinson recursion (Hosking's method) is kept
//! as an exact fallback for the case where the embedding spectrum has a
//! negative eigenvalue.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgnSpec {
    pub hurst: f64,
    pub length: usize,
    /// Standard deviation of unit-lag increments.
    pub sigma: f64,
    pub seed: u64,
}

impl FgnSpec {
    pub fn new(hurst: f64, length: usize, sigma: f64, seed: u64) -> Result<Self> {
        let spec = FgnSpec {
            hurst,
            length,
            sigma,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(HurstError::InvalidParameter(format!(
                "hurst must lie in (0, 1), got {}",
                self.hurst
            )));
        }
        if self.length < 2 {
            return Err(HurstError::InvalidParameter(format!(
                "length must be at least 2, got {}",
                self.length
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(HurstError::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SignalOrigin {
    Synthetic(FgnSpec),
    /// Only the file name is kept, never an absolute path.
    Ingested {
        source: PathBuf,
    },
    /// Built in memory by library callers.
    Provided,
}

/// A finite, non-empty sequence of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    origin: SignalOrigin,
}

impl Signal {
    pub fn new(samples: Vec<f64>, origin: SignalOrigin) -> Result<Self> {
        if samples.is_empty() {
            return Err(HurstError::InvalidParameter("signal is empty".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(HurstError::NonFiniteSample(i));
        }
        Ok(Signal { samples, origin })
    }

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        Signal::new(samples, SignalOrigin::Provided)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn origin(&self) -> &SignalOrigin {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_dyadic(&self) -> bool {
        self.samples.len().is_power_of_two()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Autocovariance of unit-lag fGn at lag `k`:
/// `(sigma^2 / 2)(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, sigma: f64, lag: usize) -> f64 {
    let k = lag as f64;
    let e = 2.0 * hurst;
    0.5 * sigma * sigma * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisMethod {
    CirculantEmbedding,
    DurbinLevinson,
}

/// Exact fGn synthesis. Circulant embedding is tried first; a negative
/// embedding eigenvalue silently switches to the Durbin-Levinson recursion.
pub fn generate_fgn(spec: &FgnSpec) -> Result<Signal> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let samples = match circulant_embedding(spec, &mut rng) {
        Some(s) => s,
        None => {
            let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
            durbin_levinson(spec, &mut rng)
        }
    };
    Signal::new(samples, SignalOrigin::Synthetic(*spec))
}

/// Synthesis with an explicitly chosen method. `CirculantEmbedding` still
/// falls back when the embedding is not nonnegative definite.
pub fn generate_fgn_with(spec: &FgnSpec, method: SynthesisMethod) -> Result<Signal> {
    match method {
        SynthesisMethod::CirculantEmbedding => generate_fgn(spec),
        SynthesisMethod::DurbinLevinson => {
            spec.validate()?;
            let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
            Signal::new(
                durbin_levinson(spec, &mut rng),
                SignalOrigin::Synthetic(*spec),
            )
        }
    }
}

fn circulant_embedding(spec: &FgnSpec, rng: &mut ChaCha20Rng) -> Option<Vec<f64>> {
    let n = spec.length;
    let m = 2 * n;
    // First row: gamma(0..=n) followed by gamma(n-1..=1).
    let mut row: Vec<Complex64> = (0..=n)
        .chain((1..n).rev())
        .map(|k| Complex64::new(fgn_autocovariance(spec.hurst, spec.sigma, k), 0.0))
        .collect();
    debug_assert_eq!(row.len(), m);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let scale = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if row.iter().any(|c| c.re < -tol) {
        return None;
    }

    let mut weighted: Vec<Complex64> = row
        .iter()
        .map(|lambda| {
            let amp = (lambda.re.max(0.0) / m as f64).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(amp * re, amp * im)
        })
        .collect();
    fft.process(&mut weighted);
    Some(weighted.iter().take(n).map(|c| c.re).collect())
}

fn durbin_levinson(spec: &FgnSpec, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let n = spec.length;
    let gamma: Vec<f64> = (0..n)
        .map(|k| fgn_autocovariance(spec.hurst, spec.sigma, k))
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut prev: Vec<f64> = Vec::with_capacity(n);
    let mut v = gamma[0];

    let z: f64 = StandardNormal.sample(rng);
    out.push(v.sqrt() * z);
    for t in 1..n {
        // Partial autocorrelation at lag t.
        let acc: f64 = (0..t - 1).map(|i| phi[i] * gamma[t - 1 - i]).sum();
        let kappa = (gamma[t] - acc) / v;
        prev.clear();
        prev.extend_from_slice(&phi);
        phi.clear();
        for i in 0..t - 1 {
            phi.push(prev[i] - kappa * prev[t - 2 - i]);
        }
        phi.push(kappa);
        v *= 1.0 - kappa * kappa;

        let mean: f64 = (0..t).map(|i| phi[i] * out[t - 1 - i]).sum();
        let z: f64 = StandardNormal.sample(rng);
        out.push(mean + v.max(0.0).sqrt() * z);
    }
    out
}

/// Running sum of the noise; the path starts implicitly at B(0) = 0.
pub fn fgn_to_fbm(noise: &Signal) -> Signal {
    let mut acc = 0.0;
    let samples = noise
        .samples()
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    Signal {
        samples,
        origin: noise.origin.clone(),
    }
}

/// fBm path of `spec.length` samples.
pub fn generate_fbm(spec: &FgnSpec) -> Result<Signal> {
    Ok(fgn_to_fbm(&generate_fgn(spec)?))
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent seed from a base seed and a path of counters
/// (e.g. `[hurst_index, replicate, purpose]`). Pure function of its inputs,
/// so replicate streams do not depend on execution order.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |h, &c| splitmix64(h ^ splitmix64(c)))
}
