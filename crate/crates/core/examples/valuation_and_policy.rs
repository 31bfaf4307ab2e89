// The firm's valuation under the two beliefs, and the monthly chance of a
// binding climate policy as conviction spreads.
//
//     cargo run --example valuation_and_policy

use divest::firm::{FirmParams, FirmState};
use divest::policy::PolicyParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = FirmParams::default();
    let mut firm = FirmState::new(&params);
    println!("month  unconstrained  constrained (value per share)");
    for month in 0..=110 {
        if month % 10 == 0 {
            println!(
                "{month:>5} {:>14.4} {:>12.4}",
                firm.npv_unconstrained(&params),
                firm.npv_constrained(&params)
            );
        }
        firm.step_extraction(&params, false);
    }
    println!("perpetuity value {:.4}", params.perpetuity_value());

    let policy = PolicyParams::default();
    println!("\nunconvinced  monthly policy probability");
    for u in [1.0, 0.5, 0.2, 0.1, 0.05, 0.0] {
        println!("{u:>11.2}  {:.3e}", policy.probability(u));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
