//! Adiabatic preparation near the critical point, with the parameter known
//! (the schedule passes through `theta`) or unknown (control-field ramp).

use super::scaling::critical_point;
use crate::dynamics::{
    default_ramp, design_critical_point, evolve_pure_split, evolved_qfi, local_adiabatic_schedule, prepare_probe_with,
    probe_schedule, probe_vector, s_for_theta, theta_for_s, Checkpoint, EvolveOptions, Form, Numerator, Schedule,
};
use crate::error::{Error, Result};
use crate::metrology::{classical_fisher, ground_state_cfi, overlap_fisher, qfi_spectral_split, QuantumState};
use crate::models::{build_h_split, optimal_measurement, HSplit, MeasurementBasis, ModelSpec, Preset};
use rayon::prelude::*;
use serde::Serialize;

/// Finite-difference step for prepared states, as a fraction of `min(Delta_c, 1)`.
pub const PREP_DELTA_FRACTION: f64 = 1e-2;

/// Schedule that prepares the ground state along `s: 0 -> 1`: the closed
/// form for Grover, otherwise a tabulated local adiabatic schedule with a
/// smooth turn-on.
pub fn preparation_schedule(spec: &ModelSpec, split: &HSplit, epsilon: f64, numerator: Numerator) -> Result<Schedule> {
    if let ModelSpec::Grover { l } = *spec {
        return Schedule::grover(l, epsilon);
    }
    let form = Form::Reparameterized;
    let ramp = default_ramp(split, &form)?;
    Ok(local_adiabatic_schedule(split, &form, epsilon, 1.0, numerator, spec.size())?.with_ramp(ramp))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdiabaticRow {
    pub theta: f64,
    pub fidelity: f64,
    pub qfi_evolved: f64,
    pub qfi_ground: f64,
    pub cfi_evolved: f64,
    pub cfi_ground: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub s: f64,
    pub theta: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdiabaticRun {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta_c: f64,
    pub gap_c: f64,
    pub t_total: f64,
    pub delta: f64,
    pub min_fidelity: f64,
    pub fidelity_at_c: f64,
    pub rows: Vec<AdiabaticRow>,
    pub trajectory: Vec<TrajectoryRow>,
}

impl AdiabaticRun {
    /// Largest `|F_evolved / F_ground - 1|` over the window.
    pub fn worst_qfi_ratio(&self) -> f64 {
        self.rows.iter().map(|r| (r.qfi_evolved / r.qfi_ground - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn populations(c: &Checkpoint) -> Result<Vec<f64>> {
    c.state.as_ref().map(QuantumState::populations).ok_or_else(|| Error::InvalidArgument("stop without a state".into()))
}

/// Evolves along the preparation schedule and records the state at each
/// `theta` of a window around `theta_c` and at `theta ± delta/2`.
pub fn run_adiabatic(
    family: &Preset,
    l: usize,
    epsilon: f64,
    numerator: Numerator,
    half_width: Option<f64>,
    points: usize,
) -> Result<AdiabaticRun> {
    if points < 1 {
        return Err(Error::InvalidArgument("need at least one window point".into()));
    }
    let spec = family.at_size(l)?;
    let split = build_h_split(&spec)?;
    let cp = critical_point(family, &split)?;
    let tc = cp.theta_c;
    let w = half_width.unwrap_or((2.0 * cp.gap_at_c).min(0.06));
    let delta = PREP_DELTA_FRACTION * cp.gap_at_c.min(1.0);
    let thetas: Vec<f64> = if points == 1 {
        vec![tc]
    } else {
        (0..points).map(|i| tc - w + 2.0 * w * i as f64 / (points - 1) as f64).collect()
    };
    if thetas.iter().any(|&t| t - delta / 2.0 <= 0.0) {
        return Err(Error::InvalidArgument("window reaches theta <= 0".into()));
    }
    let sched = preparation_schedule(&spec, &split, epsilon, numerator)?;
    let mut stop_s = Vec::with_capacity(3 * points);
    for &t in &thetas {
        stop_s.extend([s_for_theta(t - delta / 2.0), s_for_theta(t), s_for_theta(t + delta / 2.0)]);
    }
    let opts = EvolveOptions {
        stop_s,
        end_s: Some(s_for_theta(thetas[0] - delta / 2.0)),
        keep_states: false,
        ..Default::default()
    };
    let r = evolve_pure_split(&split, &sched, &Form::Reparameterized, &opts)?;
    let meas = optimal_measurement(&spec)?;
    let rows = thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let (m, c, p) = (&r.stops[3 * i], &r.stops[3 * i + 1], &r.stops[3 * i + 2]);
            let prob = |x: &Checkpoint| populations(x).map(|v| meas.probabilities(&v));
            Ok(AdiabaticRow {
                theta,
                fidelity: c.fidelity,
                qfi_evolved: evolved_qfi(m, p, delta)?,
                qfi_ground: qfi_spectral_split(&split, theta)?.value,
                cfi_evolved: classical_fisher(&prob(c)?, &prob(m)?, &prob(p)?, delta),
                cfi_ground: ground_state_cfi(&split, &meas, theta, delta)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let centre = thetas.iter().enumerate().min_by(|a, b| (a.1 - tc).abs().total_cmp(&(b.1 - tc).abs())).unwrap().0;
    let trajectory = r
        .checkpoints
        .iter()
        .map(|c| TrajectoryRow { t: c.t, s: c.s, theta: theta_for_s(c.s), fidelity: c.fidelity })
        .collect();
    Ok(AdiabaticRun {
        l,
        theta_c: tc,
        gap_c: cp.gap_at_c,
        t_total: sched.t_total,
        delta,
        min_fidelity: r.min_fidelity(),
        fidelity_at_c: rows[centre].fidelity,
        rows,
        trajectory,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub theta: f64,
    pub offset: f64,
    pub fidelity: f64,
    pub min_fidelity: f64,
    pub qfi_prepared: f64,
    pub qfi_ground: f64,
    pub cfi_prepared: f64,
    pub cfi_ground: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSweep {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta_c: f64,
    pub t_total: f64,
    pub delta: f64,
    pub rows: Vec<ProbeRow>,
}

fn probe_cfi(meas: &MeasurementBasis, c: &QuantumState, m: &QuantumState, p: &QuantumState, delta: f64) -> f64 {
    let pr = |s: &QuantumState| meas.probabilities(&s.populations());
    classical_fisher(&pr(c), &pr(m), &pr(p), delta)
}

/// Prepares probes with the control-field ramp for each `theta`. Points
/// whose finite-difference stencil reaches below `theta_c` use the
/// `theta_c` offset; their ground-state references are taken at
/// `theta + theta_c`.
pub fn run_prepare_unknown(family: &Preset, l: usize, thetas: &[f64], epsilon: f64) -> Result<ProbeSweep> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("theta list is empty".into()));
    }
    let spec = family.at_size(l)?;
    let split = build_h_split(&spec)?;
    let tc = design_critical_point(&spec, &split)?;
    let gap_c = crate::spectra::split_gap(&split, tc)?;
    let delta = 2.0 * PREP_DELTA_FRACTION * gap_c.min(1.0);
    let sched = probe_schedule(&split, tc, epsilon)?;
    let meas = optimal_measurement(&spec)?;
    let opts = EvolveOptions { keep_states: false, ..Default::default() };
    let rows = thetas
        .par_iter()
        .map(|&theta| {
            let off = theta - delta / 2.0 < tc;
            let run = |t: f64| prepare_probe_with(&split, &sched, tc, t, off, &opts);
            let (pm, pc, pp) = (run(theta - delta / 2.0)?, run(theta)?, run(theta + delta / 2.0)?);
            let eff = pc.theta_effective;
            Ok(ProbeRow {
                theta,
                offset: pc.offset,
                fidelity: pc.fidelity,
                min_fidelity: pc.min_fidelity.min(pm.min_fidelity).min(pp.min_fidelity),
                qfi_prepared: overlap_fisher(probe_vector(&pm), probe_vector(&pp), delta)?,
                qfi_ground: qfi_spectral_split(&split, eff)?.value,
                cfi_prepared: probe_cfi(&meas, &pc.state, &pm.state, &pp.state, delta),
                cfi_ground: ground_state_cfi(&split, &meas, eff, delta)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeSweep { l, theta_c: tc, t_total: sched.t_total, delta, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::preset;

    #[test]
    fn grover_preparation_follows_the_ground_state() {
        let run = run_adiabatic(&preset("grover").unwrap(), 10, 0.08, Numerator::AppendixBound, None, 5).unwrap();
        assert!(run.fidelity_at_c > 0.99 && run.min_fidelity > 0.98, "{} {}", run.fidelity_at_c, run.min_fidelity);
        assert!(run.worst_qfi_ratio() < 0.1, "{:?}", run.rows);
        for r in &run.rows {
            assert!(r.cfi_ground <= r.qfi_ground * 1.02);
        }
        assert_eq!(run.rows[2].theta, 1.0);
        assert!(run.trajectory.len() > 10);
    }

    #[test]
    fn unknown_parameter_sweep_uses_the_offset_below_theta_c() {
        let sweep = run_prepare_unknown(&preset("grover").unwrap(), 10, &[0.9, 1.1], 0.05).unwrap();
        assert_eq!(sweep.rows[0].offset, 1.0);
        assert_eq!(sweep.rows[1].offset, 0.0);
        for r in &sweep.rows {
            assert!(r.fidelity > 0.99);
        }
        let r = &sweep.rows[1];
        assert!((r.qfi_prepared / r.qfi_ground - 1.0).abs() < 0.1, "{r:?}");
        assert!((r.cfi_prepared / r.cfi_ground - 1.0).abs() < 0.1, "{r:?}");
    }
}
