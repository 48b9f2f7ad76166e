//! Wavelet-spectrum estimators of the Hurst exponent.
//!
//! Each method reduces a detail level to one statistic `y_j`, regresses
//! `y_j` on `j` by ordinary least squares and maps the slope to `H`:
//!
//! | method      | level statistic                          | slope mapping            |
//! |-------------|------------------------------------------|--------------------------|
//! | Traditional | `log2` of the mean energy                | `H = -(slope + 1) / 2`   |
//! | Soltani     | mean of `log2` mid-energies              | `H = -(slope + 1) / 2`   |
//! | MEDL        | median of `ln d^2`                       | `H = -slope / (2 ln 2) - 1/2` |
//! | MEDLA       | median of `ln` of resampled pair means   | `H = -slope / (2 ln 2) - 1/2` |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::hurst_sampling_law;
use crate::error::{HurstError, Result};
use crate::stats::{mean, median_in_place};
use crate::synthesis::derive_seed;
use crate::transform::NdwtDecomposition;

/// Energies below this are treated as exact zeros and left out of log samples.
pub const ZERO_ENERGY: f64 = 1e-300;

/// A level fails when more than this fraction of its energies is excluded.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Traditional,
    Soltani,
    Medl,
    Medla,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Traditional,
        Method::Soltani,
        Method::Medl,
        Method::Medla,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Traditional => "Traditional",
            Method::Soltani => "Soltani",
            Method::Medl => "MEDL",
            Method::Medla => "MEDLA",
        }
    }

    pub fn statistic_kind(self) -> StatisticKind {
        match self {
            Method::Traditional => StatisticKind::Log2MeanEnergy,
            Method::Soltani => StatisticKind::MeanLog2Midenergy,
            Method::Medl => StatisticKind::MedianLogEnergy,
            Method::Medla => StatisticKind::MedianLogPairavg,
        }
    }

    /// MEDL and MEDLA work in natural logs, the baselines in base 2.
    pub fn uses_natural_log(self) -> bool {
        matches!(self, Method::Medl | Method::Medla)
    }

    pub fn hurst_from_slope(self, slope: f64) -> f64 {
        if self.uses_natural_log() {
            -slope / (2.0 * std::f64::consts::LN_2) - 0.5
        } else {
            -(slope + 1.0) / 2.0
        }
    }

    /// Parse a comma separated list, with `all` expanding to every method.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Method::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(HurstError::InvalidParameter("no method given".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "traditional" => Ok(Method::Traditional),
            "soltani" => Ok(Method::Soltani),
            "medl" => Ok(Method::Medl),
            "medla" => Ok(Method::Medla),
            _ => Err(HurstError::InvalidParameter(format!(
                "unknown method `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    Log2MeanEnergy,
    MeanLog2Midenergy,
    MedianLogEnergy,
    MedianLogPairavg,
}

/// Inclusive range of levels `j_lo..=j_hi` entering the regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRange {
    pub j_lo: i32,
    pub j_hi: i32,
}

impl LevelRange {
    pub fn new(j_lo: i32, j_hi: i32) -> Result<Self> {
        if j_hi <= j_lo {
            return Err(HurstError::RangeInvalid {
                j_lo,
                j_hi,
                reason: "need j_lo < j_hi".into(),
            });
        }
        if j_hi - j_lo < 2 {
            return Err(HurstError::TooFewLevels((j_hi - j_lo + 1) as usize));
        }
        Ok(LevelRange { j_lo, j_hi })
    }

    /// Levels `J-7 ..= J-2`.
    pub fn default_for(j_max: usize) -> Result<Self> {
        let j = j_max as i32;
        LevelRange::new(j - 7, j - 2)
    }

    /// Accepts absolute levels (`4:9`) or levels relative to `J`
    /// (`Jm7:Jm2`, also written `J-7:J-2`).
    pub fn parse(spec: &str, j_max: usize) -> Result<Self> {
        let bad = || HurstError::InvalidParameter(format!("cannot parse level range `{spec}`"));
        let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
        let endpoint = |s: &str| -> Result<i32> {
            let s = s.trim();
            let rel = s.strip_prefix('J').or_else(|| s.strip_prefix('j'));
            match rel {
                Some("") => Ok(j_max as i32),
                Some(r) => {
                    let r = r
                        .strip_prefix('m')
                        .or_else(|| r.strip_prefix('-'))
                        .ok_or_else(bad)?;
                    let off: i32 = r.parse().map_err(|_| bad())?;
                    Ok(j_max as i32 - off)
                }
                None => s.parse().map_err(|_| bad()),
            }
        };
        LevelRange::new(endpoint(lo)?, endpoint(hi)?)
    }

    pub fn count(&self) -> usize {
        (self.j_hi - self.j_lo + 1) as usize
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.j_lo..=self.j_hi
    }

    pub fn check_against(&self, decomp: &NdwtDecomposition) -> Result<()> {
        if let Some(missing) = self.levels().find(|&j| decomp.level(j).is_none()) {
            return Err(HurstError::RangeInvalid {
                j_lo: self.j_lo,
                j_hi: self.j_hi,
                reason: format!(
                    "level {missing} is not in a depth-{} decomposition with J = {}",
                    decomp.depth(),
                    decomp.j_max()
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    /// Resolution level, `j = J - scale`.
    pub j: i32,
    /// Scale index of the transform stage, 1 = finest.
    pub scale: Option<usize>,
    pub y: f64,
    /// Number of values the statistic was computed from.
    pub n_j: usize,
    pub statistic_kind: StatisticKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub method: Method,
    pub hurst: f64,
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<SpectrumPoint>,
    pub theoretical_variance: Option<f64>,
    pub seed: Option<u64>,
}

/// Resampling plan for one MEDLA level: `count` pairs drawn with
/// replacement among index pairs at least `separation` apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSamplePlan {
    pub j: i32,
    pub separation: usize,
    pub count: usize,
    pub seed: u64,
}

impl PairSamplePlan {
    /// Plan for level `j` of a length-`n` decomposition: separation
    /// `2^{J-j}`, `n` pairs, seed derived from `(seed, j)`.
    pub fn for_level(j: i32, j_max: usize, n: usize, seed: u64) -> Self {
        let gap = (j_max as i64 - j as i64).clamp(0, 62) as u32;
        PairSamplePlan {
            j,
            separation: 1usize << gap,
            count: n,
            seed: derive_seed(seed, &[j as i64 as u64]),
        }
    }

    /// Realize the plan on a level of length `n`. Pairs are uniform over
    /// `{(a, b) : 0 <= a, b < n, b - a >= separation}` (plain index distance).
    pub fn sample_pairs(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        let q = self.separation;
        if q >= n {
            return Err(HurstError::NoAdmissiblePair { separation: q, n });
        }
        // Pairs indexed by t = b - q in 0..n-q, with a in 0..=t.
        let span = (n - q) as u64;
        let total = span * (span + 1) / 2;
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        let pairs = (0..self.count)
            .map(|_| {
                let u = rng.random_range(0..total);
                let t = triangular_root(u);
                let a = u - t * (t + 1) / 2;
                (a as usize, (t as usize) + q)
            })
            .collect();
        Ok(pairs)
    }
}

/// Largest `t` with `t(t+1)/2 <= u`.
fn triangular_root(u: u64) -> u64 {
    let mut t = ((((8.0 * u as f64) + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while t * (t + 1) / 2 > u {
        t -= 1;
    }
    while (t + 1) * (t + 2) / 2 <= u {
        t += 1;
    }
    t
}

/// Natural logs of the energies, dropping (near) zeros. Fails when more
/// than [`MAX_EXCLUDED_FRACTION`] of them are dropped.
fn log_sample(
    j: i32,
    energies: impl ExactSizeIterator<Item = f64>,
    log: fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let total = energies.len();
    let logs: Vec<f64> = energies.filter(|&e| e >= ZERO_ENERGY).map(log).collect();
    let excluded = total - logs.len();
    if logs.is_empty() || excluded as f64 > MAX_EXCLUDED_FRACTION * total as f64 {
        return Err(HurstError::DegenerateLevel {
            level: j,
            excluded,
            total,
        });
    }
    Ok(logs)
}

fn point(j: i32, y: f64, n_j: usize, kind: StatisticKind) -> SpectrumPoint {
    SpectrumPoint {
        j,
        scale: None,
        y,
        n_j,
        statistic_kind: kind,
    }
}

fn non_empty(j: i32, coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(HurstError::DegenerateLevel {
            level: j,
            excluded: 0,
            total: 0,
        });
    }
    Ok(())
}

/// Median of `ln d^2` over the level.
pub fn medl_level_stat(j: i32, coeffs: &[f64]) -> Result<SpectrumPoint> {
    non_empty(j, coeffs)?;
    let mut logs = log_sample(j, coeffs.iter().map(|d| d * d), f64::ln)?;
    let n_j = logs.len();
    let y = median_in_place(&mut logs).expect("log sample is non-empty");
    Ok(point(j, y, n_j, StatisticKind::MedianLogEnergy))
}

/// Median of `ln((d_a^2 + d_b^2) / 2)` over the pairs drawn by `plan`.
pub fn medla_level_stat(coeffs: &[f64], plan: &PairSamplePlan) -> Result<SpectrumPoint> {
    let j = plan.j;
    let pairs = plan.sample_pairs(coeffs.len())?;
    let mut logs = log_sample(j, pair_energies(coeffs, &pairs), f64::ln)?;
    let n_j = logs.len();
    let y = median_in_place(&mut logs).expect("log sample is non-empty");
    Ok(point(j, y, n_j, StatisticKind::MedianLogPairavg))
}

fn pair_energies<'a>(
    coeffs: &'a [f64],
    pairs: &'a [(usize, usize)],
) -> impl ExactSizeIterator<Item = f64> + 'a {
    pairs.iter().map(move |&(a, b)| {
        let (x, y) = (coeffs[a], coeffs[b]);
        0.5 * (x * x + y * y)
    })
}

fn mid_energies(coeffs: &[f64]) -> impl ExactSizeIterator<Item = f64> + '_ {
    let half = coeffs.len() / 2;
    coeffs[..half]
        .iter()
        .zip(&coeffs[half..])
        .map(|(a, b)| 0.5 * (a * a + b * b))
}

/// Mean of `log2` mid-energies `(d_k^2 + d_{k+n/2}^2) / 2`, `k < n/2`.
pub fn soltani_level_stat(j: i32, coeffs: &[f64]) -> Result<SpectrumPoint> {
    non_empty(j, coeffs)?;
    if !coeffs.len().is_multiple_of(2) {
        return Err(HurstError::OddLengthLevel(coeffs.len()));
    }
    let logs = log_sample(j, mid_energies(coeffs), f64::log2)?;
    Ok(point(
        j,
        mean(&logs),
        logs.len(),
        StatisticKind::MeanLog2Midenergy,
    ))
}

/// `log2` of the mean energy.
pub fn traditional_level_stat(j: i32, coeffs: &[f64]) -> Result<SpectrumPoint> {
    non_empty(j, coeffs)?;
    let energy = coeffs.iter().map(|d| d * d).sum::<f64>() / coeffs.len() as f64;
    if energy < ZERO_ENERGY {
        return Err(HurstError::DegenerateLevel {
            level: j,
            excluded: coeffs.len(),
            total: coeffs.len(),
        });
    }
    Ok(point(
        j,
        energy.log2(),
        coeffs.len(),
        StatisticKind::Log2MeanEnergy,
    ))
}

/// Least-squares slope and intercept of `y` on `j` for consecutive levels,
/// `slope = 12 / (m (m^2 - 1)) * sum (j - mean_j) y_j`.
pub fn regress_spectrum(points: &[SpectrumPoint]) -> Result<(f64, f64)> {
    let m = points.len();
    if m < 3 {
        return Err(HurstError::TooFewLevels(m));
    }
    if points.windows(2).any(|w| w[1].j != w[0].j + 1) {
        return Err(HurstError::NonConsecutiveLevels);
    }
    let mf = m as f64;
    let j_bar = points[0].j as f64 + (mf - 1.0) / 2.0;
    let weight = 12.0 / (mf * (mf * mf - 1.0));
    let slope = weight
        * points
            .iter()
            .map(|p| (p.j as f64 - j_bar) * p.y)
            .sum::<f64>();
    let y_bar = points.iter().map(|p| p.y).sum::<f64>() / mf;
    Ok((slope, y_bar - slope * j_bar))
}

/// The per-coefficient values each method summarizes at level `j`:
/// energies (Traditional), `log2` mid-energies (Soltani), `ln` energies
/// (MEDL) and `ln` resampled pair means (MEDLA), in index or draw order.
/// Meant for correlation diagnostics; zero energies are kept as `-inf`.
pub fn level_series(
    decomp: &NdwtDecomposition,
    method: Method,
    j: i32,
    seed: u64,
) -> Result<Vec<f64>> {
    let coeffs = decomp.level(j).ok_or_else(|| HurstError::RangeInvalid {
        j_lo: j,
        j_hi: j,
        reason: "level not present in decomposition".into(),
    })?;
    Ok(match method {
        Method::Traditional => coeffs.iter().map(|d| d * d).collect(),
        Method::Soltani => mid_energies(coeffs).map(f64::log2).collect(),
        Method::Medl => coeffs.iter().map(|d| (d * d).ln()).collect(),
        Method::Medla => {
            let plan = PairSamplePlan::for_level(j, decomp.j_max(), decomp.n(), seed);
            let pairs = plan.sample_pairs(coeffs.len())?;
            pair_energies(coeffs, &pairs).map(f64::ln).collect()
        }
    })
}

/// Full spectrum estimate over `range`. `seed` drives MEDLA resampling and is
/// mandatory for it; the other methods ignore it.
pub fn estimate_hurst(
    decomp: &NdwtDecomposition,
    method: Method,
    range: LevelRange,
    seed: Option<u64>,
) -> Result<HurstEstimate> {
    range.check_against(decomp)?;
    let seed = match (method, seed) {
        (Method::Medla, None) => {
            return Err(HurstError::InvalidParameter(
                "MEDLA needs a resampling seed".into(),
            ))
        }
        (Method::Medla, s) => s,
        _ => None,
    };

    let points = range
        .levels()
        .map(|j| {
            let coeffs = decomp.level(j).expect("range checked");
            let mut p = match method {
                Method::Traditional => traditional_level_stat(j, coeffs),
                Method::Soltani => soltani_level_stat(j, coeffs),
                Method::Medl => medl_level_stat(j, coeffs),
                Method::Medla => {
                    let plan = PairSamplePlan::for_level(
                        j,
                        decomp.j_max(),
                        decomp.n(),
                        seed.expect("checked above"),
                    );
                    medla_level_stat(coeffs, &plan)
                }
            }?;
            p.scale = decomp.scale_of(j);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;

    let (slope, intercept) = regress_spectrum(&points)?;
    let theoretical_variance = if method.uses_natural_log() {
        Some(hurst_sampling_law(method, decomp.n(), range.count())?.variance)
    } else {
        None
    };
    Ok(HurstEstimate {
        method,
        hurst: method.hurst_from_slope(slope),
        slope,
        intercept,
        points,
        theoretical_variance,
        seed,
    })
}
