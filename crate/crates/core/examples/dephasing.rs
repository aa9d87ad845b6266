//! Critical QFI after preparation under local dephasing, Grover in its
//! two-level basis.

use qpt_sensing::experiments::{run_dephasing_sweep, DephasingSettings};
use qpt_sensing::models::preset;

fn main() -> qpt_sensing::Result<()> {
    let sizes = [10, 14, 18, 22];
    let gammas = [0.0, 1e-3, 1e-2, 1e-1];
    let sweep = run_dephasing_sweep(&preset("grover")?, &sizes, &gammas, &DephasingSettings::default())?;
    print!("{:>4}", "L");
    for g in gammas {
        print!(" {:>12}", format!("gamma={g}"));
    }
    println!();
    for l in sizes {
        print!("{l:>4}");
        for g in gammas {
            let r = sweep.rows.iter().find(|r| r.l == l && r.gamma == g).unwrap();
            print!(" {:>12.4e}", r.qfi);
        }
        println!();
    }
    for (g, f) in &sweep.size_fits {
        println!("gamma={g}: F_c ~ {:.3} e^({:.4} L)", f.prefactor, f.exponent);
    }
    for l in sizes {
        if let Some(d) = sweep.decay_exponent(l) {
            println!("L={l}: F_c ~ gamma^-{d:.3}");
        }
    }
    Ok(())
}
