//! Monte Carlo comparison of the four estimators on synthetic fBm.
//!
//! Replicate `r` at the `i`-th Hurst value draws its path from
//! `derive_seed(base_seed, [i, r, 0])` and its MEDLA resampling stream from
//! `derive_seed(base_seed, [i, r, 1])`, so results do not depend on how the
//! replicates are scheduled. One NDWT per replicate is shared by all methods.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HurstError, Result};
use crate::estimators::{estimate_hurst, LevelRange, Method, PairSamplePlan};
use crate::stats::{mean, variance};
use crate::synthesis::{derive_seed, generate_fbm, FgnSpec};
use crate::transform::{max_level, ndwt, WaveletFilter};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub hursts: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub wavelet: String,
    pub depth: usize,
    pub levels: LevelRange,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    /// Standard deviation of the unit-lag increments.
    pub sigma: f64,
}

impl ExperimentConfig {
    /// 300 paths of length 2^11 per H in {0.3, 0.5, 0.7}, Haar NDWT of
    /// depth 10, levels J-7..=J-2, all four methods.
    pub fn reference_design(base_seed: u64) -> Self {
        ExperimentConfig {
            hursts: vec![0.3, 0.5, 0.7],
            n: 2048,
            reps: 300,
            wavelet: "haar".into(),
            depth: 10,
            levels: LevelRange { j_lo: 4, j_hi: 9 },
            methods: Method::ALL.to_vec(),
            base_seed,
            sigma: 1.0,
        }
    }

    pub fn validate(&self) -> Result<WaveletFilter> {
        let invalid = |msg: String| Err(HurstError::InvalidParameter(msg));
        if self.hursts.is_empty() {
            return invalid("at least one Hurst value is required".into());
        }
        if let Some(h) = self.hursts.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return invalid(format!("hurst {h} is outside (0, 1)"));
        }
        if self.reps < 2 {
            return invalid(format!("reps must be at least 2, got {}", self.reps));
        }
        if self.methods.is_empty() {
            return invalid("no methods selected".into());
        }
        if self.methods.contains(&Method::Soltani) && !self.n.is_power_of_two() {
            return invalid(format!("Soltani needs a dyadic length, got n = {}", self.n));
        }
        let filter = WaveletFilter::by_name(&self.wavelet)?;
        let j_max = max_level(self.n);
        if self.depth == 0 || self.depth > j_max {
            return Err(HurstError::DepthExceedsJ {
                depth: self.depth,
                max: j_max,
                n: self.n,
            });
        }
        let finest = j_max as i32 - 1;
        let coarsest = j_max as i32 - self.depth as i32;
        let LevelRange { j_lo, j_hi } = self.levels;
        if j_lo < coarsest || j_hi > finest || self.levels.count() < 3 {
            return Err(HurstError::RangeInvalid {
                j_lo,
                j_hi,
                reason: format!("levels must lie in {coarsest}..={finest}"),
            });
        }
        if self.methods.contains(&Method::Medla) {
            let plan = PairSamplePlan::for_level(j_lo, j_max, self.n, 0);
            if plan.separation >= self.n {
                return Err(HurstError::NoAdmissiblePair {
                    separation: plan.separation,
                    n: self.n,
                });
            }
        }
        Ok(filter)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub hurst: f64,
    pub method: Method,
    pub mean: f64,
    /// Unbiased (divisor reps - 1).
    pub variance: f64,
    pub bias_squared: f64,
    /// `variance + bias_squared`.
    pub mse: f64,
    pub estimates: Vec<f64>,
}

/// Summary statistics of one (H, method) cell.
pub fn summarize(hurst: f64, method: Method, estimates: Vec<f64>) -> CellSummary {
    let m = mean(&estimates);
    let v = variance(&estimates);
    let bias_squared = (m - hurst) * (m - hurst);
    CellSummary {
        hurst,
        method,
        mean: m,
        variance: v,
        bias_squared,
        mse: v + bias_squared,
        estimates,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub hurst: f64,
    pub replicate: usize,
    pub category: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// Cells ordered by H (config order), then by method.
    pub cells: Vec<CellSummary>,
    pub failures: Vec<ReplicateFailure>,
}

impl SimulationReport {
    pub fn cell(&self, hurst: f64, method: Method) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.hurst == hurst && c.method == method)
    }
}

/// Run the experiment on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SimulationReport> {
    let filter = config.validate()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (h_idx, &hurst) in config.hursts.iter().enumerate() {
        let outcomes: Vec<Result<Vec<f64>>> = (0..config.reps)
            .into_par_iter()
            .map(|r| run_replicate(config, &filter, &methods, h_idx, hurst, r))
            .collect();

        let mut per_method: Vec<Vec<f64>> = vec![Vec::with_capacity(config.reps); methods.len()];
        let mut failed_here = 0;
        for (r, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(values) => {
                    for (slot, v) in per_method.iter_mut().zip(values) {
                        slot.push(v);
                    }
                }
                Err(e) => {
                    failed_here += 1;
                    failures.push(ReplicateFailure {
                        hurst,
                        replicate: r,
                        category: e.category().to_string(),
                        message: e.to_string(),
                    });
                }
            }
        }
        // More than 1% failed replicates aborts.
        if failed_here * 100 > config.reps || config.reps - failed_here < 2 {
            return Err(HurstError::ExperimentAborted {
                failed: failed_here,
                total: config.reps,
                first: failures
                    .iter()
                    .find(|f| f.hurst == hurst)
                    .map(|f| f.message.clone())
                    .unwrap_or_default(),
            });
        }
        for (method, estimates) in methods.iter().zip(per_method) {
            cells.push(summarize(hurst, *method, estimates));
        }
    }
    Ok(SimulationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        cells,
        failures,
    })
}

/// Run the experiment on a dedicated pool; `threads == 0` picks the
/// rayon default.
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<SimulationReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HurstError::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

fn run_replicate(
    config: &ExperimentConfig,
    filter: &WaveletFilter,
    methods: &[Method],
    h_idx: usize,
    hurst: f64,
    r: usize,
) -> Result<Vec<f64>> {
    let path_seed = derive_seed(config.base_seed, &[h_idx as u64, r as u64, 0]);
    let resample_seed = derive_seed(config.base_seed, &[h_idx as u64, r as u64, 1]);
    let spec = FgnSpec::new(hurst, config.n, config.sigma, path_seed)?;
    let path = generate_fbm(&spec)?;
    let decomp = ndwt(&path, filter, config.depth)?;
    methods
        .iter()
        .map(|&m| estimate_hurst(&decomp, m, config.levels, Some(resample_seed)).map(|e| e.hurst))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMethod {
    pub method: Method,
    pub mse: f64,
    /// MSE minus the best MSE at this H.
    pub delta_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRanking {
    pub hurst: f64,
    pub ranked: Vec<RankedMethod>,
}

/// Methods ordered by MSE at each H, best first. Ties keep alphabetical
/// order of the method names.
pub fn compare_methods(report: &SimulationReport) -> Result<Vec<MethodRanking>> {
    let mut hursts: Vec<f64> = Vec::new();
    for c in &report.cells {
        if !hursts.contains(&c.hurst) {
            hursts.push(c.hurst);
        }
    }
    hursts
        .into_iter()
        .map(|hurst| {
            let mut cells: Vec<&CellSummary> =
                report.cells.iter().filter(|c| c.hurst == hurst).collect();
            if cells.len() < 2 {
                return Err(HurstError::SingleMethodReport);
            }
            cells.sort_by(|a, b| {
                a.mse
                    .total_cmp(&b.mse)
                    .then_with(|| a.method.label().cmp(b.method.label()))
            });
            let best = cells[0].mse;
            Ok(MethodRanking {
                hurst,
                ranked: cells
                    .iter()
                    .map(|c| RankedMethod {
                        method: c.method,
                        mse: c.mse,
                        delta_mse: c.mse - best,
                    })
                    .collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            hursts: vec![0.4, 0.8],
            n: 256,
            reps: 6,
            wavelet: "haar".into(),
            depth: 7,
            levels: LevelRange { j_lo: 2, j_hi: 6 },
            methods: Method::ALL.to_vec(),
            base_seed: 17,
            sigma: 1.0,
        }
    }

    #[test]
    fn two_replicate_mean_is_the_arithmetic_mean() {
        let cfg = ExperimentConfig {
            reps: 2,
            ..small_config()
        };
        let report = run_experiment(&cfg).unwrap();
        for cell in &report.cells {
            assert_eq!(cell.estimates.len(), 2);
            assert_eq!(cell.mean, (cell.estimates[0] + cell.estimates[1]) / 2.0);
            assert_eq!(cell.mse, cell.variance + cell.bias_squared);
        }
    }

    #[test]
    fn identical_across_thread_counts() {
        let cfg = small_config();
        let a = run_experiment_with_threads(&cfg, 1).unwrap();
        let b = run_experiment_with_threads(&cfg, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 8);
        assert!(a.failures.is_empty());
    }

    #[test]
    fn validation() {
        let bad = |f: fn(&mut ExperimentConfig)| {
            let mut c = small_config();
            f(&mut c);
            run_experiment(&c).unwrap_err().category()
        };
        assert_eq!(bad(|c| c.reps = 1), "invalid-parameter");
        assert_eq!(bad(|c| c.hursts = vec![1.2]), "invalid-parameter");
        assert_eq!(bad(|c| c.n = 250), "invalid-parameter");
        assert_eq!(bad(|c| c.depth = 9), "depth-exceeds-j");
        assert_eq!(
            bad(|c| c.levels = LevelRange { j_lo: 0, j_hi: 6 }),
            "range-invalid"
        );
        assert_eq!(
            bad(|c| c.levels = LevelRange { j_lo: 3, j_hi: 8 }),
            "range-invalid"
        );
        assert_eq!(bad(|c| c.wavelet = "coif2".into()), "invalid-parameter");
    }

    #[test]
    fn ranking_orders_by_mse_and_breaks_ties_by_name() {
        let cells = vec![
            summarize(0.5, Method::Medla, vec![0.5, 0.6]),
            summarize(0.5, Method::Medl, vec![0.5, 0.6]),
            summarize(0.5, Method::Traditional, vec![0.5, 0.9]),
            summarize(0.5, Method::Soltani, vec![0.5, 0.5]),
        ];
        let report = SimulationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            config: small_config(),
            cells,
            failures: vec![],
        };
        let ranking = compare_methods(&report).unwrap();
        let order: Vec<Method> = ranking[0].ranked.iter().map(|r| r.method).collect();
        assert_eq!(
            order,
            vec![
                Method::Soltani,
                Method::Medl,
                Method::Medla,
                Method::Traditional
            ]
        );
        assert_eq!(ranking[0].ranked[0].delta_mse, 0.0);

        let single = SimulationReport {
            cells: vec![summarize(0.5, Method::Medl, vec![0.4, 0.6])],
            ..report
        };
        assert!(matches!(
            compare_methods(&single),
            Err(HurstError::SingleMethodReport)
        ));
    }
}
