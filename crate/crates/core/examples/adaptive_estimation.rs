//! Adaptive estimation of theta near the Grover critical point: each round
//! picks the probe size suited to the current uncertainty, shifts the probe
//! onto the critical point with a control field and updates by maximum
//! likelihood.

use qpt_sensing::experiments::{adaptive_estimate, optimal_probe_size, AdaptiveConfig};
use qpt_sensing::models::preset;

fn main() -> qpt_sensing::Result<()> {
    for eps in [1.0, 0.5, 0.1, 0.01] {
        let (l, f) = optimal_probe_size(eps)?;
        println!("eps = {eps:<5} L_opt = {l:.3}  F_max = {f:.4e}");
    }
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = AdaptiveConfig { theta_true: 1.05, epsilon0: 0.2, rounds: 4, shots_per_round: 10_000, seed, max_probe_size: 40 };
    let run = adaptive_estimate(&preset("grover")?, &cfg)?;
    println!("\ntheta_true {}  initial guess {:.5}", cfg.theta_true, run.theta_initial);
    for r in &run.rounds {
        println!(
            "round {}: L={:<2} control={:+.5} estimate={:.9} eps_next={:.3e} (CR {:.3e}){}",
            r.iteration,
            r.probe_size,
            r.control_field,
            r.theta_est,
            r.epsilon_next,
            r.cramer_rao,
            if r.flagged { " flagged" } else { "" }
        );
    }
    if run.stopped_at_cap {
        println!("stopped: the next probe would exceed {} qubits", cfg.max_probe_size);
    }
    Ok(())
}
