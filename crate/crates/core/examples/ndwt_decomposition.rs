//! Non-decimated Haar and Daubechies decompositions of an fBm path; prints
//! the mean energy of every level, indexed by `j = J - s`.

use hurstlab::prelude::*;

fn main() -> hurstlab::Result<()> {
    let path = generate_fbm(&FgnSpec::new(0.6, 2048, 1.0, 7)?)?;
    for name in ["haar", "db4"] {
        let filter = WaveletFilter::by_name(name)?;
        let d = ndwt(&path, &filter, 8)?;
        println!("{name}: J = {}, depth {}", d.j_max(), d.depth());
        for j in d.levels() {
            let c = d.level(j).expect("listed level");
            let energy = c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64;
            println!(
                "  j={j:>2} s={} log2 energy {:>7.3}",
                d.scale_of(j).unwrap(),
                energy.log2()
            );
        }
    }
    Ok(())
}
