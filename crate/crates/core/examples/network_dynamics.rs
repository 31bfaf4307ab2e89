// The investor network: small-world construction, and how belief spreads
// and edges rewire over one run.
//
//     cargo run --example network_dynamics

use divest::engine::World;
use divest::social::init_small_world;
use divest::SimConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fraction of edges joining investors of opposite belief.
fn discordant(world: &World) -> f64 {
    let edges = world.network.edge_list();
    let n = edges
        .iter()
        .filter(|&&(a, b)| world.investors[a].convinced != world.investors[b].convinced)
        .count();
    n as f64 / edges.len() as f64
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let net = init_small_world(400, 10, 0.1, &mut rng)?;
    println!(
        "small world: {} nodes, {} edges, connected {}",
        net.node_count(),
        net.edge_count(),
        net.is_connected()
    );

    let mut config = SimConfig {
        seed: 4,
        ..SimConfig::default()
    };
    config.apply_overrides(&["social.sif=0.5", "social.phi=0.3"])?;
    let mut world = World::new(&config)?;
    while !world.is_finished() {
        if world.month % 25 == 0 {
            println!(
                "month {:>3}: fci {:.3}, discordant edges {:.3}, price {:.3}",
                world.month,
                world.fci(),
                discordant(&world),
                world.market.price
            );
        }
        world.step_month();
    }
    println!("edges at the end: {}", world.network.edge_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
