//! The reference Monte Carlo design: 300 paths of length 2^11 per H, Haar
//! NDWT of depth 10, levels J-7..J-2. Prints the summary table and writes it
//! as CSV when a path is given.
//!
//! cargo run --release --example reference_table -- table.csv

use hurstlab::io::{table_csv, write_atomic};
use hurstlab::simharness::{compare_methods, run_experiment, ExperimentConfig};

fn main() -> hurstlab::Result<()> {
    let report = run_experiment(&ExperimentConfig::reference_design(1))?;
    println!(
        "{:<5} {:<13} {:>11} {:>11} {:>11} {:>11}",
        "H", "", "Traditional", "Soltani", "MEDL", "MEDLA"
    );
    for &h in &report.config.hursts {
        let cells: Vec<_> = report.cells.iter().filter(|c| c.hurst == h).collect();
        let row = |name: &str, f: fn(&hurstlab::simharness::CellSummary) -> f64| {
            let vals: Vec<String> = cells.iter().map(|c| format!("{:>11.4}", f(c))).collect();
            println!("{h:<5} {name:<13} {}", vals.join(" "));
        };
        row("Mean", |c| c.mean);
        row("Variance", |c| c.variance);
        row("Bias-squared", |c| c.bias_squared);
        row("MSE", |c| c.mse);
    }
    for r in compare_methods(&report)? {
        let order: Vec<&str> = r.ranked.iter().map(|m| m.method.label()).collect();
        println!("H = {}: {}", r.hurst, order.join(" < "));
    }
    if let Some(path) = std::env::args().nth(1) {
        write_atomic(path.as_ref(), table_csv(&report).as_bytes())?;
    }
    Ok(())
}
