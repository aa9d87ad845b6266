//! Adiabatic schedules `s(t)`.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::models::HSplit;
use crate::spectra::{eigensolve_matrix, Solver};
use serde::{Deserialize, Serialize};

pub const GAP_GRID_POINTS: usize = 201;
pub const GAP_GRID_REFINE: usize = 5;
const MIN_GAP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    GroverAnalytic,
    LocalAdiabaticNumeric,
    Linear,
}

/// Numerator `c(s)` of the local adiabatic condition `dt/ds = c/(eps gap^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Numerator {
    /// `c = L`, an upper bound on the transition matrix element.
    AppendixBound,
    /// `c = |<1(s)| dH/ds |0(s)>|`.
    ExactMatrixElement,
    /// `c = max_s |<1(s)| dH/ds |0(s)>|`, constant. The exact element can be
    /// orders of magnitude below its peak where the ground state barely
    /// moves; the schedule then sweeps so fast that `ds/dt` changes on a time
    /// scale shorter than the inverse gap and real excitations appear.
    PeakMatrixElement,
}

/// Which time-dependent Hamiltonian a schedule drives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Form {
    /// `s H1 + (1 - s) H2`; its ground state at `s` is that of `H1 + theta
    /// H2` with `theta = (1 - s)/s`.
    Reparameterized,
    /// `s/(1-s) H1 + (theta + offset) H2`, ramped up to `s = 1/2`.
    Controlled { theta: f64, offset: f64 },
}

impl Form {
    /// Coefficients `(a, b)` of `a H1 + b H2` at `s`.
    pub fn coefficients(&self, s: f64) -> (f64, f64) {
        match *self {
            Form::Reparameterized => (s, 1.0 - s),
            Form::Controlled { theta, offset } => (s / (1.0 - s), theta + offset),
        }
    }

    /// Coefficients of `dH/ds`.
    pub fn derivative(&self, s: f64) -> (f64, f64) {
        match *self {
            Form::Reparameterized => (1.0, -1.0),
            Form::Controlled { .. } => (1.0 / (1.0 - s).powi(2), 0.0),
        }
    }

    pub fn hamiltonian(&self, split: &HSplit, s: f64) -> SymMatrix {
        let (a, b) = self.coefficients(s);
        SymMatrix::lin_comb(a, &split.h1.matrix, b, &split.h2.matrix)
    }
}

/// Reparameterized `s` at which `H(s)` is proportional to `H1 + theta H2`.
pub fn s_for_theta(theta: f64) -> f64 {
    1.0 / (1.0 + theta)
}

pub fn theta_for_s(s: f64) -> f64 {
    (1.0 - s) / s
}

#[derive(Clone, Debug)]
enum Profile {
    Grover { n: f64 },
    Linear { duration: f64 },
    /// Gap and numerator on an s-grid; `t` is the cumulative schedule time
    /// with both linear inside each cell.
    Table { s: Vec<f64>, g: Vec<f64>, c: Vec<f64>, t: Vec<f64> },
}

/// Monotone map `t -> s(t)` with `s(0) = 0` and `s(T) = s_end`.
///
/// Tabulated schedules may start with a smooth turn-on of length `ramp`
/// during which `ds/dt` rises from zero, and end with a mirrored landing of
/// length `landing`; each adds half its length to the total time.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub epsilon: f64,
    pub s_end: f64,
    pub t_total: f64,
    pub ramp: f64,
    pub landing: f64,
    profile: Profile,
}

/// `int_0^u (c0 + a x) / (g0 + b x)^2 dx`.
fn cell_integral(c0: f64, a: f64, g0: f64, b: f64, u: f64) -> f64 {
    let r = b * u / g0;
    if r.abs() < 1e-4 {
        let g2 = g0 * g0;
        return c0 * u / g2 + (a - 2.0 * c0 * b / g0) * u * u / (2.0 * g2)
            + (3.0 * c0 * b * b / g2 - 2.0 * a * b / g0) * u.powi(3) / (3.0 * g2);
    }
    let y = g0 + b * u;
    ((c0 - a * g0 / b) * (1.0 / g0 - 1.0 / y) + (a / b) * (y / g0).ln()) / b
}

impl Schedule {
    /// The closed-form local adiabatic schedule for Grover search,
    /// `t(s) = N (atan(sqrt(N-1)(2s-1)) + atan sqrt(N-1)) / (2 eps sqrt(N-1))`.
    pub fn grover(l: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let n = (l as f64).exp2();
        let mut s = Schedule {
            kind: ScheduleKind::GroverAnalytic,
            epsilon,
            s_end: 1.0,
            t_total: 0.0,
            ramp: 0.0,
            landing: 0.0,
            profile: Profile::Grover { n },
        };
        s.t_total = s.t_at(1.0);
        Ok(s)
    }

    pub fn linear(duration: f64, s_end: f64) -> Result<Self> {
        if !(duration >= 0.0) || !(s_end > 0.0 && s_end <= 1.0) {
            return Err(Error::InvalidArgument(format!("bad linear schedule ({duration}, {s_end})")));
        }
        Ok(Schedule {
            kind: ScheduleKind::Linear,
            epsilon: 0.0,
            s_end,
            t_total: duration,
            ramp: 0.0,
            landing: 0.0,
            profile: Profile::Linear { duration },
        })
    }

    /// Local adiabatic schedule from tabulated gap and numerator values.
    pub fn from_table(s: Vec<f64>, g: Vec<f64>, c: Vec<f64>, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if s.len() < 2 || g.len() != s.len() || c.len() != s.len() {
            return Err(Error::TooFewPoints(s.len()));
        }
        if s[0] != 0.0 || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("s grid must start at 0 and increase".into()));
        }
        if let Some((i, &gv)) = g.iter().enumerate().find(|(_, &v)| !(v >= MIN_GAP)) {
            return Err(Error::GapTooSmall { s: s[i], gap: gv });
        }
        if c.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidArgument("numerator must be positive".into()));
        }
        let mut t = vec![0.0; s.len()];
        for i in 1..s.len() {
            let h = s[i] - s[i - 1];
            let a = (c[i] - c[i - 1]) / h;
            let b = (g[i] - g[i - 1]) / h;
            t[i] = t[i - 1] + cell_integral(c[i - 1], a, g[i - 1], b, h) / epsilon;
        }
        let t_total = *t.last().unwrap();
        let s_end = *s.last().unwrap();
        Ok(Schedule {
            kind: ScheduleKind::LocalAdiabaticNumeric,
            epsilon,
            s_end,
            t_total,
            ramp: 0.0,
            landing: 0.0,
            profile: Profile::Table { s, g, c, t },
        })
    }

    /// Adds a smooth turn-on of length `ramp` (only for tabulated schedules).
    /// The turn-on and landing are capped so that they never overlap.
    pub fn with_ramp(mut self, ramp: f64) -> Self {
        if matches!(self.profile, Profile::Table { .. }) && ramp > 0.0 {
            let ramp = ramp.min(2.0 * self.undelayed_total() - self.landing);
            self.t_total += ramp / 2.0 - self.ramp / 2.0;
            self.ramp = ramp;
        }
        self
    }

    /// Adds a smooth stop of length `landing`, so that `ds/dt` falls to zero
    /// at `s_end` (only for tabulated schedules).
    pub fn with_landing(mut self, landing: f64) -> Self {
        if matches!(self.profile, Profile::Table { .. }) && landing > 0.0 {
            let landing = landing.min(2.0 * self.undelayed_total() - self.ramp);
            self.t_total += landing / 2.0 - self.landing / 2.0;
            self.landing = landing;
        }
        self
    }

    fn undelayed_total(&self) -> f64 {
        self.t_total - self.ramp / 2.0 - self.landing / 2.0
    }

    /// Undelayed schedule time for wall time `t`.
    fn warp(&self, t: f64) -> f64 {
        // integral of the smootherstep 6x^5 - 15x^4 + 10x^3
        let w = |x: f64| x.powi(4) * (x * x - 3.0 * x + 2.5);
        let (r, l) = (self.ramp, self.landing);
        if l > 0.0 && t > self.t_total - l {
            return self.undelayed_total() - l * w((self.t_total - t).max(0.0) / l);
        }
        if r > 0.0 && t < r {
            return r * w(t / r);
        }
        t - r / 2.0
    }

    pub fn s_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.t_total {
            return self.s_end;
        }
        let s = match &self.profile {
            Profile::Grover { n } => {
                let a = (n - 1.0).sqrt();
                0.5 + (2.0 * self.epsilon * a * t / n - a.atan()).tan() / (2.0 * a)
            }
            Profile::Linear { duration } => {
                if *duration == 0.0 {
                    self.s_end
                } else {
                    self.s_end * t / duration
                }
            }
            Profile::Table { s, g, c, t: tt } => {
                let tau = self.warp(t);
                let i = tt.partition_point(|&x| x <= tau).clamp(1, tt.len() - 1) - 1;
                let h = s[i + 1] - s[i];
                let a = (c[i + 1] - c[i]) / h;
                let b = (g[i + 1] - g[i]) / h;
                let target = (tau - tt[i]) * self.epsilon;
                s[i] + invert_cell(c[i], a, g[i], b, h, target)
            }
        };
        s.clamp(0.0, self.s_end)
    }

    /// Inverse of [`Schedule::s_at`].
    pub fn t_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.s_end);
        match &self.profile {
            Profile::Grover { n } => {
                let a = (n - 1.0).sqrt();
                n * ((a * (2.0 * s - 1.0)).atan() + a.atan()) / (2.0 * self.epsilon * a)
            }
            Profile::Linear { duration } => duration * s / self.s_end,
            Profile::Table { s: sg, g, c, t } => {
                let i = sg.partition_point(|&x| x <= s).clamp(1, sg.len() - 1) - 1;
                let h = sg[i + 1] - sg[i];
                let a = (c[i + 1] - c[i]) / h;
                let b = (g[i + 1] - g[i]) / h;
                let tau = t[i] + cell_integral(c[i], a, g[i], b, s - sg[i]) / self.epsilon;
                self.unwarp(tau)
            }
        }
    }

    fn unwarp(&self, tau: f64) -> f64 {
        let (r, l) = (self.ramp, self.landing);
        let (lo, hi) = if r > 0.0 && tau < r / 2.0 {
            (0.0, r)
        } else if l > 0.0 && tau > self.undelayed_total() - l / 2.0 {
            (self.t_total - l, self.t_total)
        } else {
            return tau + r / 2.0;
        };
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.warp(mid) < tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `dt/ds` of the undelayed schedule.
    pub fn dt_ds(&self, s: f64) -> f64 {
        match &self.profile {
            Profile::Grover { n } => {
                let gap2 = 1.0 - 4.0 * (1.0 - 1.0 / n) * s * (1.0 - s);
                1.0 / (self.epsilon * gap2)
            }
            Profile::Linear { duration } => duration / self.s_end,
            Profile::Table { s: sg, g, c, .. } => {
                let i = sg.partition_point(|&x| x <= s).clamp(1, sg.len() - 1) - 1;
                let w = (s - sg[i]) / (sg[i + 1] - sg[i]);
                let gv = g[i] + w * (g[i + 1] - g[i]);
                let cv = c[i] + w * (c[i + 1] - c[i]);
                cv / (self.epsilon * gv * gv)
            }
        }
    }

    /// `n + 1` uniformly spaced `(t, s)` samples.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|k| {
                let t = self.t_total * k as f64 / n.max(1) as f64;
                (t, self.s_at(t))
            })
            .collect()
    }

    /// The tabulated s-grid and gaps, if any.
    pub fn gap_table(&self) -> Option<(&[f64], &[f64])> {
        match &self.profile {
            Profile::Table { s, g, .. } => Some((s, g)),
            _ => None,
        }
    }
}

/// Solves `eps * elapsed = int_0^u (c0 + a x)/(g0 + b x)^2 dx` for `u` in
/// `[0, h]`.
fn invert_cell(c0: f64, a: f64, g0: f64, b: f64, h: f64, target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    if cell_integral(c0, a, g0, b, h) <= target {
        return h;
    }
    if a == 0.0 {
        // gap linear, numerator constant: closed form
        let k = b;
        if (k * h / g0).abs() < 1e-4 {
            // fall through to Newton for accuracy near constant gap
        } else {
            let gv = 1.0 / (1.0 / g0 - k * target / c0);
            return ((gv - g0) / k).clamp(0.0, h);
        }
    }
    let (mut lo, mut hi) = (0.0, h);
    let mut u = (target * g0 * g0 / c0).min(h);
    for _ in 0..100 {
        let f = cell_integral(c0, a, g0, b, u) - target;
        if f > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let gv = g0 + b * u;
        let d = (c0 + a * u) / (gv * gv);
        let mut next = u - f / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 1e-15 * h.max(u) {
            return next;
        }
        u = next;
    }
    u
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Gap and `|<1|dH/ds|0>|` of the driven Hamiltonian at `s`.
pub fn gap_and_element(split: &HSplit, form: &Form, s: f64) -> Result<(f64, f64)> {
    let h = form.hamiltonian(split, s);
    let spec = eigensolve_matrix(&h, 2, Solver::Auto)?;
    let (da, db) = form.derivative(s);
    let dh = SymMatrix::lin_comb(da, &split.h1.matrix, db, &split.h2.matrix);
    let v0 = spec.states.column(0);
    let w = dh.matvec(v0.as_slice());
    let elem: f64 = spec.states.column(1).iter().zip(&w).map(|(x, y)| x * y).sum();
    Ok((spec.energies[1] - spec.energies[0], elem.abs()))
}

/// Local adiabatic schedule for `form` over `[0, s_end]`: gap on a 201-point
/// grid refined five-fold around its minimum, `dt/ds = c/(eps gap^2)`.
pub fn local_adiabatic_schedule(
    split: &HSplit,
    form: &Form,
    epsilon: f64,
    s_end: f64,
    numerator: Numerator,
    size: usize,
) -> Result<Schedule> {
    check_epsilon(epsilon)?;
    if !(s_end > 0.0 && s_end <= 1.0) {
        return Err(Error::InvalidArgument(format!("s_end must be in (0, 1], got {s_end}")));
    }
    if matches!(form, Form::Controlled { .. }) && s_end >= 1.0 {
        return Err(Error::InvalidArgument("controlled form needs s_end < 1".into()));
    }
    let n = GAP_GRID_POINTS;
    let coarse: Vec<f64> = (0..n).map(|i| s_end * i as f64 / (n - 1) as f64).collect();
    let vals = coarse.iter().map(|&s| gap_and_element(split, form, s)).collect::<Result<Vec<_>>>()?;
    let imin = (0..n).min_by(|&a, &b| vals[a].0.total_cmp(&vals[b].0)).unwrap();
    let (lo, hi) = (imin.saturating_sub(1), (imin + 1).min(n - 1));
    let mut s = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..lo {
        s.push(coarse[i]);
        pairs.push(vals[i]);
    }
    let m = (hi - lo) * GAP_GRID_REFINE;
    for k in 0..=m {
        let x = coarse[lo] + (coarse[hi] - coarse[lo]) * k as f64 / m as f64;
        s.push(x);
        pairs.push(if k == 0 { vals[lo] } else if k == m { vals[hi] } else { gap_and_element(split, form, x)? });
    }
    for i in hi + 1..n {
        s.push(coarse[i]);
        pairs.push(vals[i]);
    }
    let g: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let c: Vec<f64> = match numerator {
        Numerator::AppendixBound => vec![size as f64; s.len()],
        // the element vanishes where symmetry forbids the transition; keep
        // the schedule finite there
        Numerator::ExactMatrixElement => {
            let floor = 1e-12 * pairs.iter().map(|p| p.1).fold(0.0, f64::max);
            pairs.iter().map(|p| p.1.max(floor)).collect()
        }
        Numerator::PeakMatrixElement => vec![pairs.iter().map(|p| p.1).fold(0.0, f64::max); s.len()],
    };
    Schedule::from_table(s, g, c, epsilon)
}

/// Turn-on length of ten periods of the initial gap.
pub fn default_ramp(split: &HSplit, form: &Form) -> Result<f64> {
    let (g0, _) = gap_and_element(split, form, 0.0)?;
    Ok(20.0 * std::f64::consts::PI / g0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grover_endpoints_and_midpoint() {
        let s = Schedule::grover(10, 0.1).unwrap();
        assert_eq!(s.s_at(0.0), 0.0);
        assert!((s.s_at(s.t_total) - 1.0).abs() < 1e-12);
        let n = 1024f64;
        let a = (n - 1.0).sqrt();
        let mid = n * a.atan() / (2.0 * 0.1 * a);
        assert_relative_eq!(s.t_at(0.5), mid, max_relative = 1e-14);
        assert_relative_eq!(s.t_at(0.5), s.t_total / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn grover_inverse_round_trip() {
        let s = Schedule::grover(16, 0.05).unwrap();
        for x in [0.01, 0.3, 0.5, 0.77, 0.999] {
            assert!((s.s_at(s.t_at(x)) - x).abs() < 1e-10);
        }
    }

    #[test]
    fn grover_total_time_is_pi_over_two_eps_gap() {
        // the s-form gap at s = 1/2 is 1/sqrt(N), half the theta-form value
        for (l, eps) in [(16, 0.1), (24, 0.05)] {
            let n = 2f64.powi(l as i32);
            let s = Schedule::grover(l, eps).unwrap();
            let expected = std::f64::consts::PI / (2.0 * eps / n.sqrt());
            assert!((s.t_total / expected - 1.0).abs() < 2.0 / n.sqrt());
        }
    }

    #[test]
    fn constant_gap_gives_linear_time() {
        let s: Vec<f64> = (0..11).map(|i| i as f64 * 0.08).collect();
        let sch = Schedule::from_table(s, vec![0.5; 11], vec![3.0; 11], 0.2).unwrap();
        assert_relative_eq!(sch.t_total, 3.0 * 0.8 / (0.2 * 0.25), max_relative = 1e-12);
        assert_relative_eq!(sch.s_at(sch.t_total / 4.0), 0.2, max_relative = 1e-12);
    }

    #[test]
    fn cell_integral_matches_quadrature() {
        for (c0, a, g0, b) in [(2.0, 0.5, 0.3, -0.2), (1.0, -3.0, 1.0, 5.0), (1.0, 0.0, 0.4, 1e-9)] {
            let u = 0.1;
            let n = 20000;
            let q: f64 = (0..n)
                .map(|k| {
                    let x = (k as f64 + 0.5) * u / n as f64;
                    (c0 + a * x) / (g0 + b * x).powi(2) * u / n as f64
                })
                .sum();
            assert_relative_eq!(cell_integral(c0, a, g0, b, u), q, max_relative = 1e-8);
            let tgt = 0.4 * q;
            let x = invert_cell(c0, a, g0, b, u, tgt);
            assert_relative_eq!(cell_integral(c0, a, g0, b, x), tgt, max_relative = 1e-10);
        }
    }

    #[test]
    fn ramp_preserves_endpoints_and_monotonicity() {
        let s: Vec<f64> = (0..21).map(|i| i as f64 * 0.05).collect();
        let g: Vec<f64> = s.iter().map(|x| 0.2 + (x - 0.6f64).abs()).collect();
        let sch = Schedule::from_table(s, g, vec![1.0; 21], 0.1).unwrap().with_ramp(10.0);
        assert!((sch.s_at(sch.t_total) - 1.0).abs() < 1e-12);
        let samples = sch.samples(2000);
        assert!(samples.windows(2).all(|w| w[1].1 >= w[0].1));
        for x in [0.001, 0.2, 0.7] {
            assert!((sch.s_at(sch.t_at(x)) - x).abs() < 1e-9);
        }
    }

    #[test]
    fn landing_stops_smoothly() {
        let s: Vec<f64> = (0..21).map(|i| i as f64 * 0.025).collect();
        let g: Vec<f64> = s.iter().map(|x| 0.2 + (0.5 - x)).collect();
        let base = Schedule::from_table(s.clone(), g.clone(), vec![1.0; 21], 0.1).unwrap();
        let sch = base.clone().with_ramp(4.0).with_landing(6.0);
        assert_relative_eq!(sch.t_total, base.t_total + 5.0, max_relative = 1e-14);
        assert_eq!(sch.s_at(sch.t_total), 0.5);
        // ds/dt vanishes at the end
        let h = 1e-4;
        let v_end = (sch.s_at(sch.t_total) - sch.s_at(sch.t_total - h)) / h;
        let v_mid = (sch.s_at(20.0 + h) - sch.s_at(20.0)) / h;
        assert!(v_end < 1e-6 * v_mid);
        let samples = sch.samples(4000);
        assert!(samples.windows(2).all(|w| w[1].1 >= w[0].1));
        for x in [0.001, 0.25, 0.499, 0.49999] {
            assert!((sch.s_at(sch.t_at(x)) - x).abs() < 1e-9);
        }
    }
}
