//! Repeated MEDLA estimates on independent paths, checked for normality
//! against a fitted normal and against the independent-coefficient law.

use hurstlab::asymptotics::{hurst_sampling_law, normality_diagnostics, NormalLaw};
use hurstlab::prelude::*;
use hurstlab::synthesis::derive_seed;

fn main() -> hurstlab::Result<()> {
    let truth = 0.5;
    let (n, reps) = (1024, 200);
    let estimates = (0..reps)
        .map(|r| {
            let seed = derive_seed(9, &[r]);
            let path = generate_fbm(&FgnSpec::new(truth, n, 1.0, seed)?)?;
            let d = ndwt(&path, &WaveletFilter::haar(), 9)?;
            let range = LevelRange::default_for(d.j_max())?;
            Ok(estimate_hurst(&d, Method::Medla, range, Some(seed))?.hurst)
        })
        .collect::<hurstlab::Result<Vec<f64>>>()?;

    let fitted = normality_diagnostics(&estimates, NormalLaw::fitted(&estimates))?;
    println!(
        "mean {:.4}, sd {:.4}, skew {:+.3}, kurt {:+.3}",
        fitted.mean,
        fitted.variance.sqrt(),
        fitted.skewness,
        fitted.excess_kurtosis
    );
    println!(
        "KS vs fitted normal: {:.4} (critical {:.4})",
        fitted.ks_distance, fitted.ks_critical_01
    );

    let law = hurst_sampling_law(Method::Medla, n, 6)?;
    let theory = normality_diagnostics(&estimates, law.centered_at(truth))?;
    println!(
        "KS vs iid law (sd {:.4}): {:.4}",
        law.std_dev(),
        theory.ks_distance
    );
    Ok(())
}
