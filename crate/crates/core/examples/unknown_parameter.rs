//! Probe preparation when theta is unknown: the schedule ramps a control
//! field instead of theta. Below theta_c the probe is shifted by theta_c.

use qpt_sensing::experiments::run_prepare_unknown;
use qpt_sensing::models::preset;

fn main() -> qpt_sensing::Result<()> {
    let thetas: Vec<f64> = (0..=8).map(|i| 0.99 + 0.0025 * i as f64).collect();
    let sweep = run_prepare_unknown(&preset("grover")?, 16, &thetas, 0.03)?;
    println!("grover L=16, ramp time {:.4e}", sweep.t_total);
    println!("{:>8} {:>6} {:>9} {:>11} {:>11} {:>11} {:>11}", "theta", "offset", "fidelity", "F_Q prep", "F_Q gs", "F_C prep", "F_C gs");
    for r in &sweep.rows {
        println!(
            "{:>8.4} {:>6} {:>9.6} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}",
            r.theta, r.offset, r.fidelity, r.qfi_prepared, r.qfi_ground, r.cfi_prepared, r.cfi_ground
        );
    }
    Ok(())
}
