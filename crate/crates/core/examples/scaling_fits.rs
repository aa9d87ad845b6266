//! Gap and critical QFI against system size for the three scaling presets,
//! and the check that the QFI exponent is twice the gap exponent.

use qpt_sensing::experiments::run_scaling;
use qpt_sensing::models::preset;

fn main() -> qpt_sensing::Result<()> {
    for name in ["pspin-second", "pspin-first", "biclique-scaling"] {
        let p = preset(name)?;
        let study = run_scaling(&p, &p.sizes, 0.25)?;
        println!("{name}");
        for r in &study.rows {
            println!("  L={:<3} theta_c={:.6} gap={:.4e} F_c={:.4e}", r.l, r.theta_c, r.gap, r.qfi);
        }
        let b = &study.beta_two_alpha;
        println!(
            "  gap {:?}: alpha = {:.4} (r2 {:.4}); qfi {:?}: beta = {:.4} (r2 {:.4}); beta/2alpha - 1 = {:+.3}\n",
            study.gap.fit_kind,
            b.alpha,
            study.gap.r_squared,
            study.qfi.fit_kind,
            b.beta,
            study.qfi.r_squared,
            b.relative_error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
