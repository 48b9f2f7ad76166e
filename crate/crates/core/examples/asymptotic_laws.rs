//! Closed-form medians and variances for the median-based estimators.

use hurstlab::asymptotics::*;
use hurstlab::estimators::Method;

fn main() -> hurstlab::Result<()> {
    println!("Q = {:.6}, A = {:.6}", q_constant(), a_constant());
    let n = 2048;
    println!(
        "level-median variance at N = {n}: MEDL {:.4e}, MEDLA {:.4e}",
        medl_median_variance(n)?,
        medla_median_variance(n)?
    );
    for j in 4..=9 {
        println!(
            "  j={j}: MEDL median {:+.4}, MEDLA median {:+.4}",
            medl_population_median(0.7, 1.0, j),
            medla_population_median(0.7, 1.0, j)
        );
    }
    for m in [Method::Medl, Method::Medla] {
        let law = hurst_sampling_law(m, n, 6)?;
        println!("{}: Var(H) = {:.4e}", m.label(), law.variance);
        if let Some(note) = &law.note {
            println!("  note: {note}");
        }
    }
    Ok(())
}
