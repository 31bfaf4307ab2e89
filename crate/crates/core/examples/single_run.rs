// Simulate one trajectory and print it every ten months.
//
//     cargo run --example single_run -- [seed]

use divest::analysis::classify;
use divest::engine::run;
use divest::SimConfig;

pub fn run_example(seed: u64) -> Result<(), Box<dyn std::error::Error>> {
    let config = SimConfig {
        seed,
        ..SimConfig::default()
    };
    let record = run(&config)?;
    println!("month    price    fci     cce  budget  policy");
    for row in record.rows().filter(|r| r.month % 10 == 0) {
        println!(
            "{:>5} {:>8.3} {:>6.3} {:>7.1} {:>7.1} {:>7}",
            row.month, row.price, row.fci, row.cce, row.budget, row.policy
        );
    }
    println!(
        "final CCE {:.1}, type {}, events {:?}",
        record.final_cce,
        classify(&record, &config).letter(),
        record.events
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    run_example(seed)
}
