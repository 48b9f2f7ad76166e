//! Acceptance gate. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::LN_2;
use std::process::ExitCode;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use hurstlab::asymptotics::{
    hurst_sampling_law, medl_population_median, medla_population_median, normality_diagnostics,
    NormalLaw,
};
use hurstlab::estimators::{level_series, Method};
use hurstlab::io::read_report;
use hurstlab::simharness::SimulationReport;
use hurstlab::stats::{median_in_place, variance};
use hurstlab::synthesis::{derive_seed, generate_fbm, generate_fgn, FgnSpec};
use hurstlab::transform::{circular_shift, dwt_samples, level_acf, ndwt_samples, WaveletFilter};

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// Target means for the reference design (H, Traditional, Soltani, MEDL, MEDLA).
const REFERENCE_MEANS: [(f64, [f64; 4]); 3] = [
    (0.3, [0.2864, 0.2849, 0.2778, 0.2783]),
    (0.5, [0.475, 0.5091, 0.4966, 0.4982]),
    (0.7, [0.5524, 0.7286, 0.7065, 0.7084]),
];

fn reference_report() -> SimulationReport {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let seed = SEED.to_string();
    let args = [
        "hurstlab",
        "--quiet",
        "--seed",
        &seed,
        "--out",
        out.to_str().unwrap(),
        "simulate",
        "--hurst",
        "0.3,0.5,0.7",
        "--n",
        "2048",
        "--reps",
        "300",
        "--wavelet",
        "haar",
        "--depth",
        "10",
        "--levels",
        "Jm7:Jm2",
        "--methods",
        "all",
    ];
    hurstlab::cli::run_from(args).expect("simulate");
    let env = read_report::<serde_json::Value>(&out).unwrap();
    serde_json::from_value(env.payload["report"].clone()).unwrap()
}

fn table_reproduction(report: &SimulationReport) -> Outcome {
    let mut misses = Vec::new();
    for (h, reference) in REFERENCE_MEANS {
        for (i, method) in Method::ALL.iter().enumerate() {
            if *method == Method::Traditional {
                continue;
            }
            let got = report.cell(h, *method).unwrap().mean;
            if (got - reference[i]).abs() > 0.02 {
                misses.push(format!("{method} H={h}: {got:.4} vs {:.4}", reference[i]));
            }
        }
    }
    let trad = report.cell(0.7, Method::Traditional).unwrap().mean;
    if trad > 0.62 {
        misses.push(format!("Traditional H=0.7 mean {trad:.4} > 0.62"));
    }
    let mse = |m| report.cell(0.7, m).unwrap().mse;
    let order = [
        Method::Medla,
        Method::Medl,
        Method::Soltani,
        Method::Traditional,
    ];
    let ordered = order.windows(2).all(|w| mse(w[0]) < mse(w[1]));
    if !ordered {
        misses.push("MSE ordering at H=0.7".into());
    }
    let msg = format!(
        "means within 0.02, Traditional(0.7) = {trad:.4}, MSE(0.7) {:.4} < {:.4} < {:.4} < {:.4}",
        mse(Method::Medla),
        mse(Method::Medl),
        mse(Method::Soltani),
        mse(Method::Traditional)
    );
    outcome(
        misses.is_empty(),
        if misses.is_empty() {
            msg
        } else {
            misses.join("; ")
        },
    )
}

fn normality(report: &SimulationReport) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for h in [0.3, 0.5, 0.7] {
        for method in [Method::Medl, Method::Medla] {
            let est = &report.cell(h, method).unwrap().estimates;
            let diag = normality_diagnostics(est, NormalLaw::fitted(est)).unwrap();
            let bias = (diag.mean - h).abs();
            let ok = diag.consistent_at_01 && bias < 0.02;
            pass &= ok;
            parts.push(format!(
                "{method} H={h}: KS {:.4}/{:.4} |bias| {bias:.4}{}",
                diag.ks_distance,
                diag.ks_critical_01,
                if ok { "" } else { " (miss)" }
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

// Variance of the sample median over `reps` samples of `n` draws of `draw`.
fn median_variance<F>(n: usize, reps: usize, seed: u64, draw: F) -> f64
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    let medians: Vec<f64> = (0..reps)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, r| {
                let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, &[r as u64]));
                for v in buf.iter_mut() {
                    *v = draw(&mut rng);
                }
                median_in_place(buf).unwrap()
            },
        )
        .collect();
    variance(&medians)
}

fn median_variance_laws() -> Outcome {
    let n = 4096;
    let reps = 100_000;
    // ln is monotone, so the median of ln X is ln of the median of X.
    let v_medl = median_variance(n, reps, SEED, |rng| {
        let z: f64 = StandardNormal.sample(rng);
        (z * z).ln()
    });
    let v_medla = median_variance(n, reps, SEED + 1, |rng| {
        let e: f64 = Exp1.sample(rng);
        e.ln()
    });
    let t_medl = 5.4418 / n as f64;
    let t_medla = 2.0814 / n as f64;
    let r1 = v_medl / t_medl;
    let r2 = v_medla / t_medla;
    let pass = (r1 - 1.0).abs() <= 0.10 && (r2 - 1.0).abs() <= 0.10;
    outcome(
        pass,
        format!(
            "ln chi2_1 median variance {v_medl:.4e} (ratio {r1:.4}), ln(chi2_2/2) {v_medla:.4e} (ratio {r2:.4}), tol 10%"
        ),
    )
}

fn population_medians() -> Outcome {
    let draws = 10_000_000;
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let mut a: Vec<f64> = (0..draws)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (z * z).ln()
        })
        .collect();
    let mut b: Vec<f64> = (0..draws)
        .map(|_| {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            ((z1 * z1 + z2 * z2) / 2.0).ln()
        })
        .collect();
    let ma = median_in_place(&mut a).unwrap();
    let mb = median_in_place(&mut b).unwrap();
    let ta = 0.4549f64.ln();
    let tb = LN_2.ln();
    let mut pass = (ma - ta).abs() <= 0.002 && (mb - tb).abs() <= 0.002;

    let mut worst = 0.0f64;
    for h in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for sigma2 in [0.5, 1.0, 3.0] {
            let slope = -LN_2 * (2.0 * h + 1.0);
            for j in -4..12 {
                let d1 =
                    medl_population_median(h, sigma2, j + 1) - medl_population_median(h, sigma2, j);
                let d2 = medla_population_median(h, sigma2, j + 1)
                    - medla_population_median(h, sigma2, j);
                worst = worst.max((d1 - slope).abs()).max((d2 - slope).abs());
            }
        }
    }
    pass &= worst < 1e-12;
    outcome(
        pass,
        format!(
            "median ln chi2_1 {ma:.5} vs {ta:.5}, median ln(chi2_2/2) {mb:.5} vs {tb:.5} (tol 0.002); slope error {worst:.1e}"
        ),
    )
}

fn sampling_law_constants() -> Outcome {
    let medl = hurst_sampling_law(Method::Medl, 2048, 6).unwrap();
    let medla = hurst_sampling_law(Method::Medla, 2048, 6).unwrap();
    let n = 2048.0;
    let m = 6.0;
    let formula = 3.0 / (n * m * (m * m - 1.0) * LN_2.powi(4));
    let pass = (medl.variance - 7.9007e-5).abs() <= 1e-7
        && (medla.variance - formula).abs() <= 1e-15 * formula
        && (medla.variance - 7.9007e-5).abs() > 1e-7
        && medla.note.is_some();
    outcome(
        pass,
        format!(
            "MEDL {:.6e} (target 7.9007e-5, tol 1e-7); MEDLA {:.6e} = 3/(N m(m^2-1) ln^4 2) with note",
            medl.variance, medla.variance
        ),
    )
}

fn transform_invariants() -> Outcome {
    let haar = WaveletFilter::haar();
    let db4 = WaveletFilter::daubechies(4).unwrap();
    let mut problems = Vec::new();

    let x = generate_fgn(&FgnSpec::new(0.6, 1024, 1.0, SEED).unwrap())
        .unwrap()
        .into_samples();

    // Shift covariance, exact.
    for filter in [&haar, &db4] {
        let base = ndwt_samples(&x, filter, 8).unwrap();
        for shift in [1, 7, 300] {
            let moved = ndwt_samples(&circular_shift(&x, shift), filter, 8).unwrap();
            for j in base.levels() {
                if circular_shift(base.level(j).unwrap(), shift) != moved.level(j).unwrap() {
                    problems.push(format!("shift {shift} level {j} ({})", filter.name));
                }
            }
        }
    }

    // Constant signal.
    let mut worst_const = 0.0f64;
    for filter in [&haar, &db4] {
        let d = ndwt_samples(&vec![3.25; 512], filter, 7).unwrap();
        for j in d.levels() {
            for v in d.level(j).unwrap() {
                worst_const = worst_const.max(v.abs());
            }
        }
    }
    if worst_const >= 1e-12 {
        problems.push(format!("constant detail {worst_const:e}"));
    }

    // Parseval for the orthogonal transform.
    let mut worst_parseval = 0.0f64;
    for filter in [&haar, &db4] {
        let d = dwt_samples(&x, filter, 6).unwrap();
        let e_in: f64 = x.iter().map(|v| v * v).sum();
        let e_out: f64 = d.all_coefficients().map(|v| v * v).sum();
        worst_parseval = worst_parseval.max((e_in - e_out).abs() / e_in);
    }
    if worst_parseval >= 1e-9 {
        problems.push(format!("Parseval {worst_parseval:e}"));
    }

    // Unit white noise: every orthonormal NDWT level has unit variance.
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let noise: Vec<f64> = (0..1 << 20)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let mut worst_white = 0.0f64;
    let d = ndwt_samples(&noise, &haar, 8).unwrap();
    for j in d.levels() {
        let c = d.level(j).unwrap();
        let v = c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64;
        worst_white = worst_white.max((v - 1.0).abs());
    }
    if worst_white > 0.1 {
        problems.push(format!(
            "white-noise level variance off by {worst_white:.3}"
        ));
    }

    // fBm: adjacent-level variance ratio 2^{2H+1}, pooled over 100 paths.
    // Coefficients whose support wraps past the end of the path straddle the
    // jump x[n-1] -> x[0] and are not coefficients of the process. The ratio
    // is asymptotic in scale; at scale 2 -> 3 its exact discrete-time value for
    // H = 0.3 is 0.834 of the limit, so the check starts at scale 3.
    let mut worst_ratio = 0.0f64;
    for h in [0.3, 0.5, 0.7] {
        let n = 2048;
        let depth = 8;
        let mut energy = [0.0f64; 9];
        let mut count = [0usize; 9];
        for s in 0..100u64 {
            let path = generate_fbm(&FgnSpec::new(h, n, 1.0, derive_seed(SEED, &[s])).unwrap())
                .unwrap()
                .into_samples();
            let d = ndwt_samples(&path, &haar, depth).unwrap();
            for scale in 1..=depth {
                let interior = &d.detail_at_scale(scale).unwrap()[..=n - (1 << scale)];
                energy[scale] += interior.iter().map(|v| v * v).sum::<f64>();
                count[scale] += interior.len();
            }
        }
        let target = 2f64.powf(2.0 * h + 1.0);
        for scale in 3..=5 {
            let ratio = (energy[scale + 1] / count[scale + 1] as f64)
                / (energy[scale] / count[scale] as f64);
            let rel = (ratio / target - 1.0).abs();
            worst_ratio = worst_ratio.max(rel);
            if rel > 0.15 {
                problems.push(format!(
                    "H={h} scale {scale}->{}: ratio {ratio:.3} vs {target:.3}",
                    scale + 1
                ));
            }
        }
    }

    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "shift exact, constant {worst_const:.1e}, Parseval {worst_parseval:.1e}, white {worst_white:.3}, fBm ratio rel {worst_ratio:.3}"
            )
        } else {
            problems.join("; ")
        },
    )
}

fn fgn_autocovariance_check() -> Outcome {
    let mut worst = 0.0f64;
    let mut pass = true;
    let paths = 16;
    let n = 1 << 16;
    for h in [0.3, 0.5, 0.7] {
        let mut acc = [0.0f64; 9];
        let mut counts = [0usize; 9];
        for p in 0..paths {
            let spec = FgnSpec::new(h, n, 1.0, derive_seed(SEED, &[p])).unwrap();
            let x = generate_fgn(&spec).unwrap().into_samples();
            for k in 0..=8 {
                acc[k] += x.iter().zip(&x[k..]).map(|(a, b)| a * b).sum::<f64>();
                counts[k] += n - k;
            }
        }
        for k in 0..=8 {
            let kf = k as f64;
            let exact = 0.5
                * ((kf + 1.0).powf(2.0 * h) - 2.0 * kf.powf(2.0 * h)
                    + (kf - 1.0).abs().powf(2.0 * h));
            let err = (acc[k] / counts[k] as f64 - exact).abs();
            worst = worst.max(err);
            pass &= err <= 0.01;
        }
    }
    outcome(
        pass,
        format!("max |gamma_hat - gamma| over lags 0..8, H in {{0.3, 0.5, 0.7}}: {worst:.4} (tol 0.01, 2^20 samples)"),
    )
}

fn decorrelation() -> Outcome {
    let n = 1 << 11;
    let j = 11 - 4;
    let haar = WaveletFilter::haar();
    let (mut ndwt_wins, mut medla_wins) = (0, 0);
    for s in 0..50u64 {
        let seed = derive_seed(SEED, &[s]);
        let path = generate_fbm(&FgnSpec::new(0.5, n, 1.0, seed).unwrap())
            .unwrap()
            .into_samples();
        let nd = ndwt_samples(&path, &haar, 10).unwrap();
        let d = dwt_samples(&path, &haar, 10).unwrap();
        let r_nd = level_acf(nd.level(j).unwrap(), 1).unwrap()[1];
        let r_d = level_acf(d.level(j).unwrap(), 1).unwrap()[1];
        if r_nd > r_d {
            ndwt_wins += 1;
        }
        let energy = level_series(&nd, Method::Traditional, j, seed).unwrap();
        let pair_log = level_series(&nd, Method::Medla, j, seed).unwrap();
        let r_e = level_acf(&energy, 1).unwrap()[1];
        let r_p = level_acf(&pair_log, 1).unwrap()[1];
        if r_p < r_e {
            medla_wins += 1;
        }
    }
    outcome(
        ndwt_wins >= 45 && medla_wins >= 45,
        format!("NDWT > DWT lag-1 ACF in {ndwt_wins}/50, pair-log < energy lag-1 ACF in {medla_wins}/50 (need 45)"),
    )
}

fn main() -> ExitCode {
    let report = reference_report();
    let results = [
        (
            "C1 reference table reproduction",
            table_reproduction(&report),
        ),
        (
            "C2 median estimators unbiased and normal",
            normality(&report),
        ),
        ("C3 level-median variance laws", median_variance_laws()),
        ("C4 population medians", population_medians()),
        ("C5 sampling-law constants", sampling_law_constants()),
        ("C6 transform invariants", transform_invariants()),
        ("C7 fGn autocovariance", fgn_autocovariance_check()),
        ("C8 decorrelation ordering", decorrelation()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "[{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
