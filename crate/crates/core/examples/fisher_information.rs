//! Ground-state quantum and classical Fisher information around the
//! critical point, with the measurement that diagonalises the problem.

use qpt_sensing::metrology::{ground_state_cfi, qfi_pure_overlap_auto, qfi_spectral_split};
use qpt_sensing::models::{build_h_split, optimal_measurement, preset};
use qpt_sensing::spectra::locate_critical_split;

fn main() -> qpt_sensing::Result<()> {
    for name in ["grover", "pspin-first", "biclique-scaling"] {
        let p = preset(name)?;
        let split = build_h_split(&p.spec)?;
        let meas = optimal_measurement(&p.spec)?;
        let tc = if name == "grover" { 1.0 } else { locate_critical_split(&split, p.bracket, 1e-10)?.theta_c };
        println!("{name} (L={}, {} outcomes), theta_c = {tc:.5}", p.spec.size(), meas.len());
        println!("  {:>9} {:>12} {:>12} {:>12}", "theta", "F_Q", "F_Q overlap", "F_C");
        for k in -4..=4 {
            let theta = tc * (1.0 + 0.01 * k as f64);
            let fq = qfi_spectral_split(&split, theta)?.value;
            let fo = qfi_pure_overlap_auto(&split, theta)?.value;
            let fc = ground_state_cfi(&split, &meas, theta, 1e-5)?.value;
            println!("  {theta:>9.5} {fq:>12.5e} {fo:>12.5e} {fc:>12.5e}");
        }
    }
    Ok(())
}
