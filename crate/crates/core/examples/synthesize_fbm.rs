//! Generate fractional Gaussian noise and its running sum, then compare the
//! sample lag-1 autocovariance with the closed form.
//!
//! cargo run --example synthesize_fbm -- 0.7 4096

use hurstlab::prelude::*;
use hurstlab::synthesis::fgn_autocovariance;

fn main() -> hurstlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let hurst: f64 = args.next().map_or(0.7, |a| a.parse().expect("hurst"));
    let n: usize = args.next().map_or(4096, |a| a.parse().expect("length"));

    let spec = FgnSpec::new(hurst, n, 1.0, 42)?;
    let noise = generate_fgn(&spec)?;
    let path = fgn_to_fbm(&noise);

    let x = noise.samples();
    let lag1 = x.iter().zip(&x[1..]).map(|(a, b)| a * b).sum::<f64>() / (n - 1) as f64;
    println!("fGn H={hurst} n={n}");
    println!(
        "  lag-1 covariance: sample {lag1:.4}, exact {:.4}",
        fgn_autocovariance(hurst, 1.0, 1)
    );
    println!("  fBm endpoint B(n) = {:.3}", path.samples()[n - 1]);
    Ok(())
}
