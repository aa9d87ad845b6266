//! Dephasing master equation along a schedule.
//!
//! All jump operators are diagonal with entries ±1 and square to one, so the
//! dissipator multiplies `rho[a][b]` by `gamma (z(a).z(b) - n_ops)`, i.e.
//! `-2 gamma` times the number of operators whose signs differ on `a` and `b`.

use super::evolve::{check_form, complexify, event_times, ground_vector, max_norm, merged_events, EvolveOptions};
use super::orbit::{orbit_generator, OrbitSpace, SymmetricState};
use super::rk4::integrate;
use super::schedule::{Form, Schedule};
use super::{Checkpoint, EvolutionResult};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::metrology::QuantumState;
use crate::models::{build_h_split, build_h_split_full, BasisKind, HSplit, ModelSpec};
use crate::spectra::{eigensolve_matrix, Solver};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const TRACE_TOLERANCE: f64 = 1e-6;
const NEGATIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseOperators {
    /// One `sigma_z` between the marked state and its complement (two-level Grover basis).
    GroverCollective,
    /// `sigma_z` on every site.
    LocalZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub gamma: f64,
    pub operators: NoiseOperators,
}

impl NoiseSpec {
    pub fn new(gamma: f64, operators: NoiseOperators) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("dephasing rate must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { gamma, operators })
    }

    /// Collective noise for Grover, local noise otherwise.
    pub fn for_model(spec: &ModelSpec, gamma: f64) -> Result<Self> {
        let ops = match spec {
            ModelSpec::Grover { .. } => NoiseOperators::GroverCollective,
            _ => NoiseOperators::LocalZ,
        };
        Self::new(gamma, ops)
    }
}

/// How the density matrix is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LindbladBackend {
    /// Orbits when the model allows it, dense otherwise.
    Auto,
    /// Dense matrix: the two-level basis for collective noise, the full
    /// computational basis (`L <= 12`) for local noise.
    Dense,
    /// Permutation orbits; exact for local noise on p-spin with
    /// `lambda = 1` and on the biclique.
    Orbit,
}

pub const DENSE_LINDBLAD_LIMIT: usize = 12;

fn orbit_capable(spec: &ModelSpec) -> bool {
    match spec {
        ModelSpec::PSpin { lambda, .. } => *lambda == 1.0,
        ModelSpec::Biclique { .. } => true,
        ModelSpec::Grover { .. } => false,
    }
}

/// Checks a density matrix: unit trace and no eigenvalue below `-1e-6`.
fn check_physical(state: &QuantumState, t: f64) -> Result<()> {
    let drift = (state.trace() - 1.0).abs();
    if drift > TRACE_TOLERANCE {
        return Err(Error::TraceDrift { t, drift });
    }
    let min = match state {
        QuantumState::Pure { .. } => 0.0,
        QuantumState::Mixed { rho, .. } => nalgebra::SymmetricEigen::new(rho.clone()).eigenvalues.min(),
        QuantumState::Symmetric(s) => s.min_eigenvalue(),
    };
    if min < -NEGATIVITY_TOLERANCE {
        return Err(Error::NegativeDensity(min));
    }
    Ok(())
}

/// Integrates the dephasing master equation from the ground state of `H2`.
pub fn evolve_lindblad(spec: &ModelSpec, schedule: &Schedule, noise: &NoiseSpec, form: &Form) -> Result<EvolutionResult> {
    evolve_lindblad_with(spec, schedule, noise, form, &EvolveOptions::default(), LindbladBackend::Auto)
}

pub fn evolve_lindblad_with(
    spec: &ModelSpec,
    schedule: &Schedule,
    noise: &NoiseSpec,
    form: &Form,
    opts: &EvolveOptions,
    backend: LindbladBackend,
) -> Result<EvolutionResult> {
    check_form(schedule, form)?;
    NoiseSpec::new(noise.gamma, noise.operators)?;
    spec.validate()?;
    match noise.operators {
        NoiseOperators::GroverCollective => {
            if !matches!(spec, ModelSpec::Grover { .. }) {
                return Err(Error::InvalidArgument("collective noise is defined for the Grover model only".into()));
            }
            if backend == LindbladBackend::Orbit {
                return Err(Error::InvalidArgument("Grover has no orbit representation".into()));
            }
            let split = build_h_split(spec)?;
            // Off-diagonal elements of the two-level density matrix decay at 2 gamma.
            let deph = vec![0.0, -2.0 * noise.gamma, -2.0 * noise.gamma, 0.0];
            DenseLindblad { split: &split, deph, n_ops: 1 }.run(schedule, noise, form, opts)
        }
        NoiseOperators::LocalZ => {
            let use_orbit = match backend {
                LindbladBackend::Orbit => true,
                LindbladBackend::Dense => false,
                LindbladBackend::Auto => orbit_capable(spec),
            };
            if use_orbit {
                return evolve_orbit(spec, schedule, noise, form, opts);
            }
            let l = spec.size();
            if l > DENSE_LINDBLAD_LIMIT {
                return Err(Error::TooLarge { size: l, limit: DENSE_LINDBLAD_LIMIT });
            }
            let split = build_h_split_full(spec)?;
            let n = split.h1.dim();
            let mut deph = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    deph[a * n + b] = -2.0 * noise.gamma * (a ^ b).count_ones() as f64;
                }
            }
            DenseLindblad { split: &split, deph, n_ops: l }.run(schedule, noise, form, opts)
        }
    }
}

/// Time step: the Hamiltonian bound, or the fastest dephasing rate if larger.
fn time_step(opts: &EvolveOptions, h_norm: f64, gamma: f64, n_ops: usize) -> f64 {
    opts.dt_scale / h_norm.max(2.0 * gamma * n_ops as f64)
}

struct DenseLindblad<'a> {
    split: &'a HSplit,
    /// Row-major dissipator factors.
    deph: Vec<f64>,
    n_ops: usize,
}

impl DenseLindblad<'_> {
    fn run(&self, schedule: &Schedule, noise: &NoiseSpec, form: &Form, opts: &EvolveOptions) -> Result<EvolutionResult> {
        let split = self.split;
        let basis = split.basis();
        let n = split.h1.dim();
        let h1: CsrMatrix = split.h1.matrix.to_csr();
        let h2: CsrMatrix = split.h2.matrix.to_csr();
        let dt = time_step(opts, max_norm(split, form, schedule.s_end), noise.gamma, self.n_ops);
        let g0 = complexify(&eigensolve_matrix(&split.h2.matrix, 1, Solver::Auto)?.ground_state());
        let mut rho0 = vec![C64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                rho0[i * n + j] = g0[i] * g0[j].conj();
            }
        }
        let to_state = |y: &[C64]| QuantumState::Mixed { rho: DMatrix::from_row_slice(n, n, y), basis };

        let mut m = vec![C64::default(); n * n];
        let deph = &self.deph;
        let rhs = |t: f64, y: &[C64], d: &mut [C64]| {
            let (a, b) = form.coefficients(schedule.s_at(t));
            // m = H rho, then d = -i (m - m^dagger) + D o rho.
            m.iter_mut().for_each(|x| *x = C64::default());
            for i in 0..n {
                let out = &mut m[i * n..(i + 1) * n];
                for (h, c) in [(&h1, a), (&h2, b)] {
                    if c == 0.0 {
                        continue;
                    }
                    for (k, hik) in h.row(i) {
                        let w = c * hik;
                        let src = &y[k * n..(k + 1) * n];
                        for (o, s) in out.iter_mut().zip(src) {
                            *o += s * w;
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let comm = m[i * n + j] - m[j * n + i].conj();
                    d[i * n + j] = C64::new(comm.im, -comm.re) + y[i * n + j] * deph[i * n + j];
                }
            }
        };
        let fidelity = |s: f64, y: &[C64]| -> Result<f64> {
            let g = complexify(&ground_vector(split, form, s)?);
            let mut f = C64::default();
            for i in 0..n {
                for j in 0..n {
                    f += g[i].conj() * y[i * n + j] * g[j];
                }
            }
            Ok(f.re.clamp(0.0, 1.0))
        };
        let trace = |y: &[C64]| (0..n).map(|i| y[i * n + i].re).sum::<f64>();
        drive(schedule, opts, dt, rho0, rhs, fidelity, trace, to_state)
    }
}

fn evolve_orbit(spec: &ModelSpec, schedule: &Schedule, noise: &NoiseSpec, form: &Form, opts: &EvolveOptions) -> Result<EvolutionResult> {
    let space = Arc::new(OrbitSpace::for_model(spec)?);
    let (h1_diag, x) = orbit_generator(spec)?;
    let split = build_h_split(spec)?;
    let dt = time_step(opts, max_norm(&split, form, schedule.s_end), noise.gamma, space.total_spins());
    let g0 = complexify(&eigensolve_matrix(&split.h2.matrix, 1, Solver::Auto)?.ground_state());
    let rho0 = SymmetricState::pure(space.clone(), &DVector::from_vec(g0)).values;
    let gamma = noise.gamma;
    let rhs = |t: f64, y: &[C64], d: &mut [C64]| {
        let (a, b) = form.coefficients(schedule.s_at(t));
        space.rhs(&h1_diag, x, a, b, gamma, y, d);
    };
    let fidelity = |s: f64, y: &[C64]| -> Result<f64> {
        let g = complexify(&ground_vector(&split, form, s)?);
        Ok(space.expectation(y, &g).re.clamp(0.0, 1.0))
    };
    let trace = |y: &[C64]| space.trace(y);
    let to_state = |y: &[C64]| QuantumState::Symmetric(SymmetricState { space: space.clone(), values: y.to_vec() });
    drive(schedule, opts, dt, rho0, rhs, fidelity, trace, to_state)
}

#[allow(clippy::too_many_arguments)]
fn drive(
    schedule: &Schedule,
    opts: &EvolveOptions,
    dt: f64,
    rho0: Vec<C64>,
    rhs: impl FnMut(f64, &[C64], &mut [C64]),
    fidelity: impl Fn(f64, &[C64]) -> Result<f64>,
    trace: impl Fn(&[C64]) -> f64,
    to_state: impl Fn(&[C64]) -> QuantumState,
) -> Result<EvolutionResult> {
    let (t_end, uniform, stops) = event_times(schedule, opts);
    let events = merged_events(&uniform, &stops);
    let times: Vec<f64> = events.iter().map(|e| e.0).collect();
    let mut checkpoints: Vec<Option<Checkpoint>> = vec![None; uniform.len()];
    let mut stop_out: Vec<Option<Checkpoint>> = vec![None; stops.len()];
    let on_event = |k: usize, t: f64, y: &[C64]| -> Result<()> {
        let drift = (trace(y) - 1.0).abs();
        if drift > TRACE_TOLERANCE {
            return Err(Error::TraceDrift { t, drift });
        }
        let s = schedule.s_at(t);
        let is_stop = events[k].1.is_err();
        let state = (opts.keep_states || is_stop).then(|| to_state(y));
        if is_stop {
            check_physical(state.as_ref().expect("stop state kept"), t)?;
        }
        let cp = Checkpoint { t, s, state, fidelity: fidelity(s, y)? };
        match events[k].1 {
            Ok(i) => checkpoints[i] = Some(cp),
            Err(i) => stop_out[i] = Some(cp),
        }
        Ok(())
    };
    let (y, steps) = integrate(rho0, t_end, dt, &times, rhs, on_event)?;
    let final_state = to_state(&y);
    check_physical(&final_state, t_end)?;
    Ok(EvolutionResult {
        checkpoints: checkpoints.into_iter().flatten().collect(),
        stops: stop_out.into_iter().flatten().collect(),
        final_state,
        t_total: t_end,
        steps,
    })
}

/// Basis in which a Lindblad run with these settings stores its state.
pub fn lindblad_basis(spec: &ModelSpec, noise: &NoiseSpec, backend: LindbladBackend) -> BasisKind {
    match (noise.operators, backend) {
        (NoiseOperators::GroverCollective, _) => spec.reduced_basis(),
        (NoiseOperators::LocalZ, LindbladBackend::Orbit) => spec.reduced_basis(),
        (NoiseOperators::LocalZ, LindbladBackend::Auto) if orbit_capable(spec) => spec.reduced_basis(),
        _ => BasisKind::FullComputational { l: spec.size() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve::evolve_pure_split;
    use crate::dynamics::schedule::s_for_theta;

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_rate_matches_closed_evolution_in_two_level_basis() {
        let spec = ModelSpec::grover(10);
        let sch = Schedule::grover(10, 0.2).unwrap();
        let noise = NoiseSpec::for_model(&spec, 0.0).unwrap();
        let r = evolve_lindblad(&spec, &sch, &noise, &Form::Reparameterized).unwrap();
        let p = evolve_pure_split(&build_h_split(&spec).unwrap(), &sch, &Form::Reparameterized, &EvolveOptions::default()).unwrap();
        assert!(max_diff(&r.final_state.density().unwrap(), &p.final_state.density().unwrap()) < 1e-6);
    }

    #[test]
    fn zero_rate_matches_closed_evolution_on_orbits() {
        let spec = ModelSpec::biclique(3, 2, 1.0, 4.0, 3.5);
        let sch = Schedule::linear(30.0, s_for_theta(1.4)).unwrap();
        let noise = NoiseSpec::for_model(&spec, 0.0).unwrap();
        let r = evolve_lindblad(&spec, &sch, &noise, &Form::Reparameterized).unwrap();
        let p = evolve_pure_split(&build_h_split(&spec).unwrap(), &sch, &Form::Reparameterized, &EvolveOptions::default()).unwrap();
        let QuantumState::Symmetric(rho) = &r.final_state else { panic!() };
        let QuantumState::Pure { vector, .. } = &p.final_state else { panic!() };
        let closed = SymmetricState::pure(rho.space.clone(), vector);
        let diff = rho.values.iter().zip(&closed.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn orbit_and_dense_backends_agree_under_dephasing() {
        let spec = ModelSpec::pspin(6, 3, 1, 1.0);
        let sch = Schedule::linear(12.0, 0.6).unwrap();
        let noise = NoiseSpec::new(0.05, NoiseOperators::LocalZ).unwrap();
        let opts = EvolveOptions { checkpoints: 4, ..Default::default() };
        let orbit = evolve_lindblad_with(&spec, &sch, &noise, &Form::Reparameterized, &opts, LindbladBackend::Orbit).unwrap();
        let dense = evolve_lindblad_with(&spec, &sch, &noise, &Form::Reparameterized, &opts, LindbladBackend::Dense).unwrap();
        let a = orbit.final_state.density().unwrap();
        let b = dense.final_state.density().unwrap();
        assert!(max_diff(&a, &b) < 1e-9, "{}", max_diff(&a, &b));
        for (x, y) in orbit.checkpoints.iter().zip(&dense.checkpoints) {
            assert!((x.fidelity - y.fidelity).abs() < 1e-8);
        }
    }

    #[test]
    fn dephasing_leaves_diagonal_states_alone() {
        // H = 0 throughout; the ground state of the zero matrix is a basis vector.
        let split = build_h_split(&ModelSpec::grover(6)).unwrap();
        let zero = crate::models::HamiltonianRep::lin_comb(0.0, &split.h1, 0.0, &split.h1);
        let lb = DenseLindblad { split: &HSplit { h1: zero.clone(), h2: zero }, deph: vec![0.0, -0.6, -0.6, 0.0], n_ops: 1 };
        let sch = Schedule::linear(50.0, 1.0).unwrap();
        let noise = NoiseSpec::new(0.3, NoiseOperators::GroverCollective).unwrap();
        let r = lb.run(&sch, &noise, &Form::Reparameterized, &EvolveOptions::default()).unwrap();
        let first = r.checkpoints[0].state.as_ref().unwrap().density().unwrap();
        assert!(first[(0, 1)].norm() < 1e-15, "{}", first[(0, 1)]);
        for c in &r.checkpoints {
            assert!(max_diff(&c.state.as_ref().unwrap().density().unwrap(), &first) < 1e-15);
        }
    }

    #[test]
    fn dephasing_kills_coherence_at_twice_the_rate() {
        let spec = ModelSpec::grover(8);
        let split = build_h_split(&spec).unwrap();
        let zero = crate::models::HamiltonianRep::lin_comb(0.0, &split.h1, 0.0, &split.h1);
        let lb = DenseLindblad { split: &HSplit { h1: zero.clone(), h2: split.h2.clone() }, deph: vec![0.0, -0.2, -0.2, 0.0], n_ops: 1 };
        // Controlled form with no field: H = 0 while the H2 ground state is a superposition.
        let form = Form::Controlled { theta: 0.0, offset: 0.0 };
        let sch = Schedule::linear(5.0, 0.5).unwrap();
        let noise = NoiseSpec::new(0.1, NoiseOperators::GroverCollective).unwrap();
        let r = lb.run(&sch, &noise, &form, &EvolveOptions::default()).unwrap();
        let r0 = r.checkpoints[0].state.as_ref().unwrap().density().unwrap();
        let r1 = r.final_state.density().unwrap();
        assert!((r1[(0, 1)].norm() / r0[(0, 1)].norm() - (-1.0f64).exp()).abs() < 1e-10);
        assert!((r1[(0, 0)] - r0[(0, 0)]).norm() < 1e-14);
    }

    #[test]
    fn trace_and_hermiticity_are_kept() {
        let spec = ModelSpec::biclique(3, 2, 1.0, 4.0, 3.5);
        let sch = Schedule::linear(20.0, 0.5).unwrap();
        let noise = NoiseSpec::new(0.2, NoiseOperators::LocalZ).unwrap();
        let r = evolve_lindblad_with(&spec, &sch, &noise, &Form::Reparameterized, &EvolveOptions::default(), LindbladBackend::Dense).unwrap();
        for c in &r.checkpoints {
            let rho = c.state.as_ref().unwrap().density().unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-8);
            assert!(max_diff(&rho, &rho.adjoint()) < 1e-8);
            assert!((0.0..=1.0).contains(&c.fidelity));
        }
    }

    #[test]
    fn rejects_negative_rate_and_mismatched_operators() {
        assert!(NoiseSpec::new(-0.1, NoiseOperators::LocalZ).is_err());
        let spec = ModelSpec::pspin(6, 3, 1, 1.0);
        let noise = NoiseSpec::new(0.1, NoiseOperators::GroverCollective).unwrap();
        let sch = Schedule::linear(1.0, 1.0).unwrap();
        assert!(evolve_lindblad(&spec, &sch, &noise, &Form::Reparameterized).is_err());
        let big = ModelSpec::pspin(14, 3, 2, 0.5);
        let local = NoiseSpec::new(0.1, NoiseOperators::LocalZ).unwrap();
        assert!(matches!(evolve_lindblad(&big, &sch, &local, &Form::Reparameterized), Err(Error::TooLarge { .. })));
    }
}
