// Two-dimensional map of mean emissions over social interaction frequency
// and trading frequency, with the bimodal band between the regimes.
//
//     cargo run --release --example tipping_map -- [points per axis] [runs per cell]

use divest::ensemble::{sweep, Axis};
use divest::SimConfig;

pub fn run_example(points: usize, runs: usize) -> Result<(), Box<dyn std::error::Error>> {
    let axes = [
        Axis::linspace("social.sif", 0.05, 0.7, points)?,
        Axis::linspace("rho", 0.05, 0.7, points)?,
    ];
    let result = sweep(&SimConfig::default(), &axes, runs, None)?;
    let band = result.tipping_band(500.0, 300.0).unwrap_or_default();

    // H: mean above 500, L: below 300, *: bimodal band, b: other bimodal
    println!("rows: sif ascending; columns: rho ascending");
    for i in 0..points {
        let line: String = (0..points)
            .map(|j| {
                let s = &result.cell(&[i, j]).summary;
                if band.contains(&[i, j]) {
                    '*'
                } else if s.bimodal {
                    'b'
                } else if s.mean_cce > 500.0 {
                    'H'
                } else if s.mean_cce < 300.0 {
                    'L'
                } else {
                    '.'
                }
            })
            .collect();
        println!("{:>5.2} {line}", axes[0].values[i]);
    }
    println!("separating band: {} cells", band.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>());
    let points = args.next().transpose()?.unwrap_or(14);
    let runs = args.next().transpose()?.unwrap_or(40);
    run_example(points, runs)
}
