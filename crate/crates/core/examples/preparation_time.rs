//! Local adiabatic preparation time for the first-order p-spin model and
//! its exponential fit, next to the gap exponent.

use qpt_sensing::experiments::{preparation_table, run_gap_scaling, run_preparation_time_scaling};
use qpt_sensing::models::preset;

fn main() -> qpt_sensing::Result<()> {
    let p = preset("pspin-first")?;
    let sizes: Vec<usize> = (8..=24).step_by(2).collect();
    for r in preparation_table(&p, &sizes, 0.1)? {
        println!("L={:<3} theta_c={:.5} gap={:.4e} T={:.4e}", r.l, r.theta_c, r.gap, r.t_total);
    }
    let t = run_preparation_time_scaling(&p, &sizes, 0.1)?;
    let alpha = run_gap_scaling(&p, &p.sizes)?.decay_rate();
    println!("T ~ e^({:.4} L), gap ~ L e^(-{alpha:.4} L)", t.exponent);
    Ok(())
}
