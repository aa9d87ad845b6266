//! Adiabatic schedules, Schrödinger and Lindblad evolution, and probe
//! preparation.

mod evolve;
mod lindblad;
mod probe;
pub mod orbit;
mod rk4;
pub mod schedule;

pub use evolve::{evolve_pure, evolve_pure_split, evolved_qfi, Checkpoint, CheckpointRow, EvolutionResult, EvolveOptions, DT_SCALE};
pub use schedule::{
    default_ramp, gap_and_element, local_adiabatic_schedule, s_for_theta, theta_for_s, Form, Numerator, Schedule,
    ScheduleKind,
};
pub use orbit::{OrbitSpace, SymmetricState};
pub use lindblad::{evolve_lindblad, evolve_lindblad_with, lindblad_basis, LindbladBackend, NoiseOperators, NoiseSpec, DENSE_LINDBLAD_LIMIT};
pub use probe::{design_critical_point, prepare_probe, prepare_probe_with, probe_schedule, probe_vector, Probe, PROBE_S_END};
