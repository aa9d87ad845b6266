//! Closed (Schrödinger) evolution along a schedule.

use super::rk4::integrate;
use super::schedule::{Form, Schedule, ScheduleKind};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::metrology::{overlap_fisher, QuantumState};
use crate::models::{build_h_split, HSplit, ModelSpec};
use crate::spectra::{eigensolve_matrix, Solver};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::Serialize;

/// Time step as a fraction of `1/||H||_max`.
pub const DT_SCALE: f64 = 0.02;
pub const DEFAULT_CHECKPOINTS: usize = 100;
const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub t: f64,
    pub s: f64,
    pub state: Option<QuantumState>,
    /// Overlap with the instantaneous ground state.
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckpointRow {
    pub t: f64,
    pub s: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// Uniformly spaced in time.
    pub checkpoints: Vec<Checkpoint>,
    /// States at the requested stop values of `s`, in the order requested.
    pub stops: Vec<Checkpoint>,
    pub final_state: QuantumState,
    pub t_total: f64,
    pub steps: usize,
}

impl EvolutionResult {
    pub fn min_fidelity(&self) -> f64 {
        self.checkpoints.iter().chain(&self.stops).map(|c| c.fidelity).fold(1.0, f64::min)
    }

    pub fn rows(&self) -> Vec<CheckpointRow> {
        self.checkpoints.iter().map(|c| CheckpointRow { t: c.t, s: c.s, fidelity: c.fidelity }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub dt_scale: f64,
    pub checkpoints: usize,
    /// Values of `s` at which states are recorded exactly.
    pub stop_s: Vec<f64>,
    /// Stop the evolution once `s` reaches this value.
    pub end_s: Option<f64>,
    pub keep_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt_scale: DT_SCALE, checkpoints: DEFAULT_CHECKPOINTS, stop_s: Vec::new(), end_s: None, keep_states: true }
    }
}

/// Bound on `||a H1 + b H2||` over the schedule.
pub(crate) fn max_norm(split: &HSplit, form: &Form, s_end: f64) -> f64 {
    let (n1, n2) = (split.h1.matrix.max_row_sum(), split.h2.matrix.max_row_sum());
    let (a0, b0) = form.coefficients(0.0);
    let (a1, b1) = form.coefficients(s_end);
    let n = (a0.abs() * n1 + b0.abs() * n2).max(a1.abs() * n1 + b1.abs() * n2);
    n.max(f64::MIN_POSITIVE)
}

pub(crate) fn ground_vector(split: &HSplit, form: &Form, s: f64) -> Result<DVector<f64>> {
    Ok(eigensolve_matrix(&form.hamiltonian(split, s), 1, Solver::Auto)?.ground_state())
}

pub(crate) fn complexify(v: &DVector<f64>) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

pub(crate) fn check_form(schedule: &Schedule, form: &Form) -> Result<()> {
    if schedule.kind == ScheduleKind::GroverAnalytic && !matches!(form, Form::Reparameterized) {
        return Err(Error::InvalidArgument("the analytic Grover schedule drives the reparameterized form".into()));
    }
    Ok(())
}

/// Event times: uniform checkpoints then stops, with the end time.
pub(crate) fn event_times(schedule: &Schedule, opts: &EvolveOptions) -> (f64, Vec<f64>, Vec<f64>) {
    let t_end = opts.end_s.map_or(schedule.t_total, |s| schedule.t_at(s).min(schedule.t_total));
    let n = opts.checkpoints.max(1);
    let uniform: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
    let stops: Vec<f64> = opts.stop_s.iter().map(|&s| schedule.t_at(s)).collect();
    (t_end, uniform, stops)
}

/// Merges uniform and stop times into one ascending list, remembering
/// which is which (`Ok(k)` uniform, `Err(k)` stop).
pub(crate) fn merged_events(uniform: &[f64], stops: &[f64]) -> Vec<(f64, std::result::Result<usize, usize>)> {
    let mut ev: Vec<(f64, std::result::Result<usize, usize>)> =
        uniform.iter().enumerate().map(|(k, &t)| (t, Ok(k))).chain(stops.iter().enumerate().map(|(k, &t)| (t, Err(k)))).collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0));
    ev
}

/// Integrates `i d|psi>/dt = H(s(t)) |psi>` from the ground state of `H2`.
pub fn evolve_pure_split(split: &HSplit, schedule: &Schedule, form: &Form, opts: &EvolveOptions) -> Result<EvolutionResult> {
    check_form(schedule, form)?;
    let basis = split.basis();
    let h1: CsrMatrix = split.h1.matrix.to_csr();
    let h2: CsrMatrix = split.h2.matrix.to_csr();
    let dt = opts.dt_scale / max_norm(split, form, schedule.s_end);
    let y0 = complexify(&eigensolve_matrix(&split.h2.matrix, 1, Solver::Auto)?.ground_state());

    let (t_end, uniform, stops) = event_times(schedule, opts);
    let events = merged_events(&uniform, &stops);
    let times: Vec<f64> = events.iter().map(|e| e.0).collect();
    let mut checkpoints: Vec<Option<Checkpoint>> = vec![None; uniform.len()];
    let mut stop_out: Vec<Option<Checkpoint>> = vec![None; stops.len()];

    let rhs = |t: f64, y: &[C64], d: &mut [C64]| {
        let (a, b) = form.coefficients(schedule.s_at(t));
        d.iter_mut().for_each(|x| *x = C64::default());
        h1.axpy_complex(C64::new(0.0, -a), y, d);
        h2.axpy_complex(C64::new(0.0, -b), y, d);
    };
    let on_event = |k: usize, t: f64, y: &[C64]| -> Result<()> {
        let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormDrift { t, drift: (norm - 1.0).abs() });
        }
        let s = schedule.s_at(t);
        let g = ground_vector(split, form, s)?;
        let ov: C64 = g.iter().zip(y).map(|(a, b)| b * *a).sum();
        let keep = opts.keep_states || events[k].1.is_err();
        let cp = Checkpoint {
            t,
            s,
            state: keep.then(|| QuantumState::Pure { vector: DVector::from_column_slice(y), basis }),
            fidelity: ov.norm_sqr().min(1.0),
        };
        match events[k].1 {
            Ok(i) => checkpoints[i] = Some(cp),
            Err(i) => stop_out[i] = Some(cp),
        }
        Ok(())
    };
    let (y, steps) = integrate(y0, t_end, dt, &times, rhs, on_event)?;
    Ok(EvolutionResult {
        checkpoints: checkpoints.into_iter().flatten().collect(),
        stops: stop_out.into_iter().flatten().collect(),
        final_state: QuantumState::Pure { vector: DVector::from_vec(y), basis },
        t_total: t_end,
        steps,
    })
}

pub fn evolve_pure(spec: &ModelSpec, schedule: &Schedule, form: &Form) -> Result<EvolutionResult> {
    evolve_pure_split(&build_h_split(spec)?, schedule, form, &EvolveOptions::default())
}

fn pure_vector(c: &Checkpoint) -> Result<&DVector<C64>> {
    match &c.state {
        Some(QuantumState::Pure { vector, .. }) => Ok(vector),
        _ => Err(Error::InvalidArgument("checkpoint holds no pure state".into())),
    }
}

/// QFI of evolved states recorded at `theta ± delta/2` (two stops).
pub fn evolved_qfi(minus: &Checkpoint, plus: &Checkpoint, delta: f64) -> Result<f64> {
    overlap_fisher(pure_vector(minus)?, pure_vector(plus)?, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::schedule::s_for_theta;

    #[test]
    fn zero_duration_leaves_state_unchanged() {
        let split = build_h_split(&ModelSpec::pspin(6, 3, 1, 1.0)).unwrap();
        let sch = Schedule::linear(0.0, 1.0).unwrap();
        let r = evolve_pure_split(&split, &sch, &Form::Reparameterized, &EvolveOptions::default()).unwrap();
        let g = complexify(&eigensolve_matrix(&split.h2.matrix, 1, Solver::Auto).unwrap().ground_state());
        let QuantumState::Pure { vector, .. } = &r.final_state else { panic!() };
        assert!(vector.iter().zip(&g).all(|(a, b)| (a - b).norm() < 1e-15));
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn norm_is_conserved() {
        let split = build_h_split(&ModelSpec::pspin(8, 3, 1, 1.0)).unwrap();
        let sch = Schedule::linear(40.0, 1.0).unwrap();
        let r = evolve_pure_split(&split, &sch, &Form::Reparameterized, &EvolveOptions::default()).unwrap();
        for c in &r.checkpoints {
            let QuantumState::Pure { vector, .. } = c.state.as_ref().unwrap() else { panic!() };
            assert!((vector.norm() - 1.0).abs() < 1e-8 * c.t.max(1.0));
        }
        assert!(r.checkpoints.len() >= 100);
    }

    #[test]
    fn slow_grover_sweep_stays_adiabatic() {
        let spec = ModelSpec::grover(8);
        let split = build_h_split(&spec).unwrap();
        let sch = Schedule::grover(8, 0.05).unwrap();
        let opts = EvolveOptions { stop_s: vec![s_for_theta(1.0)], ..Default::default() };
        let r = evolve_pure_split(&split, &sch, &Form::Reparameterized, &opts).unwrap();
        assert!(r.min_fidelity() > 0.99);
        assert!(r.stops[0].fidelity > 0.99);
    }
}
