//! Drives the experiment runner from code: a JSON config, resolved with
//! defaults, written as CSV tables plus a manifest. The same document can
//! be passed to `qpt-sense scaling --config <file>`.

use qpt_sensing::cli::{run, Experiment, RunConfig};

fn main() -> qpt_sensing::Result<()> {
    let json = r#"{
        "model": "pspin-second",
        "sizes": [10, 14, 18, 22, 26, 30],
        "beta_tolerance": 0.25,
        "out": "results/example"
    }"#;
    let cfg: RunConfig = serde_json::from_str(json)?;
    let outcome = run(cfg, Experiment::Scaling)?;
    println!("{}", outcome.summary);
    for p in &outcome.artifacts {
        println!("wrote {}", p.display());
    }
    Ok(())
}
