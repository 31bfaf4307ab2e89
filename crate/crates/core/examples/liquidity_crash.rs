// With less investor wealth than the market capitalisation, the shares the
// investors cannot afford are sold into the market when trading opens.
//
//     cargo run --example liquidity_crash

use divest::engine::run;
use divest::SimConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for liquidity in [0.8, 1.1, 1.5] {
        let config = SimConfig {
            liquidity,
            seed: 3,
            ..SimConfig::default()
        };
        let record = run(&config)?;
        let prices: Vec<String> = record.price_series()[..8].iter().map(|p| format!("{p:.3}")).collect();
        println!(
            "L = {liquidity}: first prices [{}], crash month {:?}, final CCE {:.1}",
            prices.join(", "),
            record.events.first_crash_month,
            record.final_cce
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
