// One example trajectory for each behaviour type, found by scanning seeds
// in a configuration where divestment and delisting are common.
//
//     cargo run --release --example behavior_types

use divest::analysis::{classify, BehaviorType};
use divest::engine::run;
use divest::SimConfig;

const TYPES: [BehaviorType; 6] = [
    BehaviorType::A,
    BehaviorType::B,
    BehaviorType::C,
    BehaviorType::D,
    BehaviorType::E,
    BehaviorType::F,
];

pub fn run_example(max_seeds: u64) -> Result<(), Box<dyn std::error::Error>> {
    let mut base = SimConfig::default();
    let mut found: [Option<_>; 6] = Default::default();
    // several regimes, so that every type has a chance to appear
    for overrides in [
        ["social.sif=0.45", "sri_share=0.15"],
        ["social.sif=0.6", "sri_share=0.7"],
        ["social.sif=0.3", "rho=0.05"],
    ] {
        base.apply_overrides(&overrides)?;
        for seed in 0..max_seeds {
            let config = SimConfig { seed, ..base.clone() };
            let record = run(&config)?;
            let k = classify(&record, &config).index();
            if found[k].is_none() {
                found[k] = Some((overrides, seed, record));
            }
        }
        base = SimConfig::default();
    }
    for (t, hit) in TYPES.iter().zip(&found) {
        match hit {
            Some((o, seed, r)) => println!(
                "{}: {o:?} seed {seed}: final CCE {:.1}, crash {:?}, delisted {:?}, policy {:?}",
                t.letter(),
                r.final_cce,
                r.events.first_crash_month,
                r.events.delisting_month,
                r.events.policy_month
            ),
            None => println!("{}: not found in {max_seeds} seeds per regime", t.letter()),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example(200)
}
