//! Prepares the Grover critical state with the closed-form local adiabatic
//! schedule and compares the evolved-state QFI with the ground state's.
//! Pass a preset name to try another model, e.g. `pspin-first`.

use qpt_sensing::dynamics::Numerator;
use qpt_sensing::experiments::run_adiabatic;
use qpt_sensing::models::preset;

fn main() -> qpt_sensing::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "grover".into());
    let p = preset(&name)?;
    let (l, eps) = match name.as_str() {
        "grover" => (20, 0.08),
        "pspin-first" => (30, 0.05),
        _ => (p.spec.size(), 0.05),
    };
    let run = run_adiabatic(&p, l, eps, Numerator::AppendixBound, None, 9)?;
    println!("{name} L={l} eps={eps}: T = {:.4e}, theta_c = {:.6}, gap_c = {:.3e}", run.t_total, run.theta_c, run.gap_c);
    println!("fidelity at theta_c {:.5}, lowest along the way {:.5}", run.fidelity_at_c, run.min_fidelity);
    println!("{:>10} {:>9} {:>12} {:>12} {:>7}", "theta", "fidelity", "F evolved", "F ground", "ratio");
    for r in &run.rows {
        println!("{:>10.6} {:>9.6} {:>12.5e} {:>12.5e} {:>7.4}", r.theta, r.fidelity, r.qfi_evolved, r.qfi_ground, r.qfi_evolved / r.qfi_ground);
    }
    Ok(())
}
