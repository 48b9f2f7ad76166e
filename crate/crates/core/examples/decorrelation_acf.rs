//! Lag-1 autocorrelation of one level under the decimated and non-decimated
//! transforms, and of the per-coefficient series each estimator summarizes.

use hurstlab::estimators::level_series;
use hurstlab::prelude::*;
use hurstlab::transform::{dwt, level_acf};

fn main() -> hurstlab::Result<()> {
    let path = generate_fbm(&FgnSpec::new(0.5, 2048, 1.0, 3)?)?;
    let haar = WaveletFilter::haar();
    let nd = ndwt(&path, &haar, 10)?;
    let d = dwt(&path, &haar, 10)?;
    let j = nd.j_max() as i32 - 4;

    let lag1 = |v: &[f64]| level_acf(v, 1).map(|r| r[1]);
    println!("level j = {j}");
    println!(
        "  NDWT coefficients     {:+.3}",
        lag1(nd.level(j).unwrap())?
    );
    println!("  DWT coefficients      {:+.3}", lag1(d.level(j).unwrap())?);
    for m in Method::ALL {
        let series = level_series(&nd, m, j, 11)?;
        println!("  {:<12} series  {:+.3}", m.label(), lag1(&series)?);
    }
    Ok(())
}
