// Mean cumulative emissions as the social interaction frequency rises.
//
//     cargo run --release --example sif_sweep -- [runs per point]

use divest::ensemble::{sweep, Axis};
use divest::SimConfig;

pub fn run_example(runs: usize) -> Result<(), Box<dyn std::error::Error>> {
    let axis = Axis::linspace("social.sif", 0.05, 0.7, 14)?;
    let result = sweep(&SimConfig::default(), &[axis], runs, None)?;
    println!("  sif  mean CCE  median  low/high share");
    for cell in &result.cells {
        let s = &cell.summary;
        let bar = "#".repeat((s.mean_cce / 625.0 * 40.0).round() as usize);
        println!(
            "{:>5.2} {:>9.1} {:>7.1}  {:.2}/{:.2} {bar}",
            cell.coords[0], s.mean_cce, s.median, s.low_fraction, s.high_fraction
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(100);
    run_example(runs)
}
