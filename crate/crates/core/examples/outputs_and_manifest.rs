// Configuration files, overrides, and a tracked output directory: the same
// files the command-line tool writes.
//
//     cargo run --example outputs_and_manifest -- [output dir]

use std::path::PathBuf;

use divest::engine::run;
use divest::io::{self, OutputBundle};
use divest::SimConfig;

pub fn run_example(out: PathBuf) -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SimConfig::from_kv_str("social.sif = 0.4\nrho = 0.3\n")?;
    config.apply_overrides(&["seed=12"])?;
    config.validate()?;

    let record = run(&config)?;
    let mut bundle = OutputBundle::create(&out)?;
    bundle.write("run.csv", &io::run_csv(&record))?;
    let manifest = bundle.finish("example", &config, 1)?;

    let m = io::read_manifest(&out)?;
    for f in &m.files {
        println!("{:<12} {:>6} bytes  sha256 {}", f.path, f.bytes, &f.sha256[..16]);
    }
    println!("manifest {}, stale files {:?}", manifest.display(), io::verify_manifest(&out)?);
    println!("config echo round-trips: {}", SimConfig::from_kv_str(&m.config_text)? == config);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("divest-example"));
    run_example(out)
}
