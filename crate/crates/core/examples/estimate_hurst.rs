//! All four spectral estimators on one synthetic path, with the points of
//! each wavelet spectrum.

use hurstlab::prelude::*;

fn main() -> hurstlab::Result<()> {
    let truth = 0.7;
    let path = generate_fbm(&FgnSpec::new(truth, 2048, 1.0, 2024)?)?;
    let d = ndwt(&path, &WaveletFilter::haar(), 10)?;
    let range = LevelRange::parse("Jm7:Jm2", d.j_max())?;

    println!("true H = {truth}, levels {}..={}", range.j_lo, range.j_hi);
    for m in Method::ALL {
        let e = estimate_hurst(&d, m, range, Some(1))?;
        let ys: Vec<String> = e.points.iter().map(|p| format!("{:.2}", p.y)).collect();
        print!(
            "{:<12} H = {:.4}  slope {:+.3}  [{}]",
            m.label(),
            e.hurst,
            e.slope,
            ys.join(" ")
        );
        match e.theoretical_variance {
            Some(v) => println!("  iid sd {:.4}", v.sqrt()),
            None => println!(),
        }
    }
    Ok(())
}
