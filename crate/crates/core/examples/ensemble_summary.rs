// Monte Carlo ensemble at the default configuration: outcome distribution
// and behaviour types.
//
//     cargo run --release --example ensemble_summary -- [runs]

use divest::analysis::summarize;
use divest::ensemble::run_ensemble;
use divest::SimConfig;

pub fn run_example(runs: usize) -> Result<(), Box<dyn std::error::Error>> {
    let config = SimConfig::default();
    let records = run_ensemble(&config, runs, None)?;
    let s = summarize(&records, &config)?;
    println!("{} runs, mean CCE {:.1}", s.n_runs, s.mean_cce);
    println!("quartiles {:.1} / {:.1} / {:.1}", s.q1, s.median, s.q3);
    println!(
        "types A..F {:?}, crash fraction {:.2}, bimodal {}",
        s.types.to_array(),
        s.crash_fraction,
        s.bimodal
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(400);
    run_example(runs)
}
