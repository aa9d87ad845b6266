//! Critical QFI of states prepared under dephasing, as a function of size
//! and rate.

use super::fit::{default_window, fit_scaling, fit_window, FitKind, ScalingResult};
use super::preparation::preparation_schedule;
use super::scaling::critical_point;
use crate::dynamics::{
    evolve_lindblad_with, evolve_pure_split, evolved_qfi, s_for_theta, EvolveOptions, Form, LindbladBackend, NoiseSpec,
    Numerator, Schedule,
};
use crate::error::{Error, Result};
use crate::metrology::{qfi_from_states, qfi_spectral_split, QuantumState};
use crate::models::{build_h_split, HSplit, ModelSpec, Preset};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Step for dephasing sweeps, five times the closed-evolution step; the
/// critical QFI agrees with the finer step to five digits.
pub const LINDBLAD_DT_SCALE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingSettings {
    /// Adiabatic error budget of the preparation schedule.
    pub epsilon: f64,
    /// Numerator of the local adiabatic schedule (ignored for Grover, which
    /// uses its closed-form schedule).
    pub numerator: Numerator,
    /// Finite-difference step as a fraction of `min(Delta_c, 1)`.
    pub delta_fraction: f64,
    /// Integrator step as a fraction of `1/||H||`.
    pub dt_scale: f64,
    pub backend: LindbladBackend,
    /// Also run closed evolution at each size for comparison.
    pub closed_reference: bool,
}

impl Default for DephasingSettings {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            numerator: Numerator::AppendixBound,
            delta_fraction: 1e-3,
            dt_scale: LINDBLAD_DT_SCALE,
            backend: LindbladBackend::Auto,
            closed_reference: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DephasingRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub gamma: f64,
    pub theta_c: f64,
    pub t_total: f64,
    pub qfi: f64,
    /// `<GS|rho|GS>` at the critical point.
    pub fidelity: f64,
    /// Evolved-state QFI without noise (NaN when not computed).
    pub qfi_closed: f64,
    pub qfi_ground: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DephasingSweep {
    pub rows: Vec<DephasingRow>,
    /// Exponential fit in `L` at each rate, when enough sizes were run.
    pub size_fits: Vec<(f64, ScalingResult)>,
    /// Algebraic fit of `F_c` against the nonzero rates at each size; the
    /// decay exponent is minus the fitted exponent.
    pub gamma_fits: Vec<(usize, ScalingResult)>,
}

impl DephasingSweep {
    pub fn decay_exponent(&self, l: usize) -> Option<f64> {
        self.gamma_fits.iter().find(|(s, _)| *s == l).map(|(_, f)| -f.exponent)
    }
}

struct SizeSetup {
    l: usize,
    spec: ModelSpec,
    split: HSplit,
    theta_c: f64,
    delta: f64,
    schedule: Schedule,
    qfi_ground: f64,
}

fn stop_options(theta_c: f64, delta: f64, dt_scale: f64) -> EvolveOptions {
    EvolveOptions {
        dt_scale,
        stop_s: vec![s_for_theta(theta_c - delta / 2.0), s_for_theta(theta_c), s_for_theta(theta_c + delta / 2.0)],
        end_s: Some(s_for_theta(theta_c - delta / 2.0)),
        keep_states: false,
        checkpoints: 10,
        ..Default::default()
    }
}

fn state(c: &crate::dynamics::Checkpoint) -> Result<&QuantumState> {
    c.state.as_ref().ok_or_else(|| Error::InvalidArgument("stop without a state".into()))
}

/// Runs every `(L, gamma)` pair, one trajectory each; the three states at
/// `theta_c` and `theta_c ± delta/2` are recorded on the way.
pub fn run_dephasing_sweep(
    family: &Preset,
    sizes: &[usize],
    gammas: &[f64],
    settings: &DephasingSettings,
) -> Result<DephasingSweep> {
    if sizes.is_empty() || gammas.is_empty() {
        return Err(Error::InvalidArgument("dephasing sweep needs sizes and rates".into()));
    }
    for &g in gammas {
        NoiseSpec::new(g, crate::dynamics::NoiseOperators::LocalZ)?;
    }
    let setups = sizes
        .par_iter()
        .map(|&l| {
            let spec = family.at_size(l)?;
            let split = build_h_split(&spec)?;
            let cp = critical_point(family, &split)?;
            let delta = settings.delta_fraction * cp.gap_at_c.min(1.0);
            let schedule = preparation_schedule(&spec, &split, settings.epsilon, settings.numerator)?;
            let qfi_ground = qfi_spectral_split(&split, cp.theta_c)?.value;
            Ok(SizeSetup { l, spec, split, theta_c: cp.theta_c, delta, schedule, qfi_ground })
        })
        .collect::<Result<Vec<_>>>()?;

    let closed: Vec<f64> = setups
        .par_iter()
        .map(|st| {
            if !settings.closed_reference {
                return Ok(f64::NAN);
            }
            let r = evolve_pure_split(&st.split, &st.schedule, &Form::Reparameterized, &stop_options(st.theta_c, st.delta, crate::dynamics::DT_SCALE))?;
            evolved_qfi(&r.stops[0], &r.stops[2], st.delta)
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, f64)> = (0..setups.len()).flat_map(|i| gammas.iter().map(move |&g| (i, g))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, gamma)| {
            let st = &setups[i];
            let noise = NoiseSpec::for_model(&st.spec, gamma)?;
            let opts = stop_options(st.theta_c, st.delta, settings.dt_scale);
            let r = evolve_lindblad_with(&st.spec, &st.schedule, &noise, &Form::Reparameterized, &opts, settings.backend)?;
            let qfi = qfi_from_states(state(&r.stops[0])?, state(&r.stops[1])?, state(&r.stops[2])?, st.delta)?.value;
            Ok(DephasingRow {
                l: st.l,
                gamma,
                theta_c: st.theta_c,
                t_total: st.schedule.t_total,
                qfi,
                fidelity: r.stops[1].fidelity,
                qfi_closed: closed[i],
                qfi_ground: st.qfi_ground,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut size_fits = Vec::new();
    for &g in gammas {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.gamma == g).map(|r| (r.l as f64, r.qfi)).collect();
        if let Ok(f) = fit_window(&pts, default_window(pts.len()), FitKind::Exponential) {
            size_fits.push((g, f));
        }
    }
    let mut gamma_fits = Vec::new();
    for &l in sizes {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.l == l && r.gamma > 0.0).map(|r| (r.gamma, r.qfi)).collect();
        if let Ok(f) = fit_scaling(&pts, FitKind::Algebraic) {
            gamma_fits.push((l, f));
        }
    }
    Ok(DephasingSweep { rows, size_fits, gamma_fits })
}
