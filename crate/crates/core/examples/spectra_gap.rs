//! Gap profiles and critical points for every preset.
//!
//!     cargo run --release --example spectra_gap

use qpt_sensing::models::list_presets;
use qpt_sensing::spectra::{gap_profile, locate_critical};

fn main() -> qpt_sensing::Result<()> {
    for p in list_presets() {
        let cp = locate_critical(&p.spec, p.bracket, 1e-10)?;
        println!("{:<18} L={:<3} theta_c = {:.6}  gap_c = {:.4e}  ({})", p.name, p.spec.size(), cp.theta_c, cp.gap_at_c, p.description);
    }

    // a coarse look at the Grover anticrossing
    let spec = qpt_sensing::models::ModelSpec::grover(12);
    let thetas: Vec<f64> = (0..=8).map(|i| 0.96 + 0.01 * i as f64).collect();
    println!("\ngrover L=12");
    for (theta, gap) in gap_profile(&spec, &thetas)? {
        let bar = "#".repeat((gap * 400.0).round() as usize);
        println!("  {theta:.2} {gap:.5} {bar}");
    }
    Ok(())
}
