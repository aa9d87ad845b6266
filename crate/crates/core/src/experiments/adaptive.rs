//! Adaptive estimation: recentre the probe at the critical point with a
//! control field, size it for the current uncertainty, measure, update.

use crate::error::{Error, Result};
use crate::metrology::{classical_fisher, ground_state, PROB_FLOOR};
use crate::models::{build_h_split, optimal_measurement, HSplit, MeasurementBasis, ModelSpec, Preset};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const LIKELIHOOD_GRID: usize = 401;
pub const DEFAULT_MAX_PROBE_SIZE: usize = 40;

/// Probe size maximising the Grover QFI at distance `epsilon_det` from the
/// critical point, and that maximum.
pub fn optimal_probe_size(epsilon_det: f64) -> Result<(f64, f64)> {
    let e = epsilon_det;
    if !(e > 0.0 && e < 2.0) {
        return Err(Error::InvalidArgument(format!("detuning must lie in (0, 2), got {e}")));
    }
    let l_opt = ((2.0 * (e - 2.0) * e + 4.0) / (e * e)).log2();
    let f_max = 1.0 / (4.0 * (e - 2.0).powi(2) * e * e);
    Ok((l_opt, f_max))
}

/// Integer probe size for `epsilon_det` (at least one qubit).
pub fn probe_size_for(epsilon_det: f64) -> Result<usize> {
    Ok((optimal_probe_size(epsilon_det)?.0.floor() as usize).max(1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub theta_true: f64,
    pub epsilon0: f64,
    pub rounds: usize,
    pub shots_per_round: u64,
    pub seed: u64,
    pub max_probe_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptiveRound {
    pub iteration: usize,
    /// Estimate after this round.
    pub theta_est: f64,
    /// Half-width that sized the probe in this round.
    pub epsilon_det: f64,
    pub probe_size: usize,
    pub control_field: f64,
    pub shots: u64,
    /// Half-width carried into the next round.
    pub epsilon_next: f64,
    /// From the curvature of the log-likelihood at its maximum.
    pub standard_error: f64,
    /// `1/sqrt(M F_C)` at the estimate.
    pub cramer_rao: f64,
    /// Likelihood was flat or not peaked; nothing was updated.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptiveRun {
    pub config: AdaptiveConfig,
    pub theta_initial: f64,
    pub rounds: Vec<AdaptiveRound>,
    pub stopped_at_cap: bool,
}

/// Outcome distribution of the ground state of one probe size.
pub struct ProbeModel {
    pub l: usize,
    split: HSplit,
    meas: MeasurementBasis,
}

impl ProbeModel {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        Ok(Self { l: spec.size(), split: build_h_split(spec)?, meas: optimal_measurement(spec)? })
    }

    pub fn probabilities(&self, theta: f64) -> Result<Vec<f64>> {
        let g = ground_state(&self.split, theta)?;
        let pops: Vec<f64> = g.iter().map(|x| x * x).collect();
        Ok(self.meas.probabilities(&pops))
    }

    pub fn classical_fisher(&self, theta: f64, delta: f64) -> Result<f64> {
        Ok(classical_fisher(
            &self.probabilities(theta)?,
            &self.probabilities(theta - delta / 2.0)?,
            &self.probabilities(theta + delta / 2.0)?,
            delta,
        ))
    }
}

/// Per-purpose random streams: stream 0 draws the initial estimate, stream
/// `n + 1` the shots of round `n`.
fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn sample_counts(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; probs.len()];
    if shots == 0 {
        return Ok(counts);
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::InvalidArgument(format!("bad outcome distribution: {e}")))?;
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts)
}

/// Grid maximum likelihood over `[centre - 2 eps, centre + 2 eps]`.
/// Returns the estimate and the curvature standard error, or `None` when
/// the likelihood is flat or not peaked.
fn grid_mle(probe: &ProbeModel, counts: &[u64], centre: f64, eps: f64, control: f64) -> Result<Option<(f64, f64)>> {
    let n = LIKELIHOOD_GRID;
    let h = 4.0 * eps / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|j| centre - 2.0 * eps + h * j as f64).collect();
    let ll = grid
        .iter()
        .map(|&t| {
            let p = probe.probabilities(t + control)?;
            Ok(counts.iter().zip(&p).map(|(&c, &q)| c as f64 * q.max(PROB_FLOOR).ln()).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (lo, hi) = ll.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi - lo > 1e-12 * hi.abs().max(1.0)) {
        return Ok(None);
    }
    // ties go to the point nearest the centre
    let mid = n / 2;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| j.abs_diff(mid));
    let mut best = order[0];
    for &j in &order[1..] {
        if ll[j] > ll[best] {
            best = j;
        }
    }
    let k = best.clamp(1, n - 2);
    let curv = (ll[k + 1] - 2.0 * ll[k] + ll[k - 1]) / (h * h);
    if !(curv < 0.0) {
        return Ok(None);
    }
    Ok(Some((grid[best], 1.0 / (-curv).sqrt())))
}

/// Adaptive loop for the Grover family with `theta_c = 1`.
pub fn adaptive_estimate(family: &Preset, cfg: &AdaptiveConfig) -> Result<AdaptiveRun> {
    if !matches!(family.spec, ModelSpec::Grover { .. }) {
        return Err(Error::InvalidArgument("the probe-size rule is derived for the Grover family".into()));
    }
    if !(cfg.theta_true > 0.0) {
        return Err(Error::InvalidArgument(format!("theta_true must be positive, got {}", cfg.theta_true)));
    }
    if !(cfg.epsilon0 > 0.0 && cfg.epsilon0 < cfg.theta_true.min(2.0)) {
        return Err(Error::InvalidArgument(format!("epsilon0 must lie in (0, min(theta_true, 2)), got {}", cfg.epsilon0)));
    }
    let theta_c = 1.0;
    let theta_initial = cfg.theta_true + cfg.epsilon0 * stream(cfg.seed, 0).gen_range(-1.0..1.0);
    let mut theta_est = theta_initial;
    let mut eps = cfg.epsilon0;
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let mut stopped_at_cap = false;
    for n in 0..cfg.rounds {
        let l = probe_size_for(eps)?;
        if l > cfg.max_probe_size {
            stopped_at_cap = true;
            break;
        }
        let probe = ProbeModel::new(&family.at_size(l)?)?;
        let control = theta_c - theta_est;
        let counts = sample_counts(&probe.probabilities(cfg.theta_true + control)?, cfg.shots_per_round, &mut stream(cfg.seed, n as u64 + 1))?;
        let fit = if cfg.shots_per_round == 0 { None } else { grid_mle(&probe, &counts, theta_est, eps, control)? };
        let round = match fit {
            Some((est, se)) => {
                let f = probe.classical_fisher(est + control, 1e-4 * eps)?;
                let cr = if f > 0.0 { 1.0 / (cfg.shots_per_round as f64 * f).sqrt() } else { f64::INFINITY };
                let next = se.max(cr);
                let shrunk = next < eps;
                let r = AdaptiveRound {
                    iteration: n,
                    theta_est: est,
                    epsilon_det: eps,
                    probe_size: l,
                    control_field: control,
                    shots: cfg.shots_per_round,
                    epsilon_next: if shrunk { next } else { eps },
                    standard_error: se,
                    cramer_rao: cr,
                    flagged: !shrunk,
                };
                theta_est = est;
                r
            }
            None => AdaptiveRound {
                iteration: n,
                theta_est,
                epsilon_det: eps,
                probe_size: l,
                control_field: control,
                shots: cfg.shots_per_round,
                epsilon_next: eps,
                standard_error: f64::INFINITY,
                cramer_rao: f64::INFINITY,
                flagged: true,
            },
        };
        eps = round.epsilon_next;
        rounds.push(round);
    }
    Ok(AdaptiveRun { config: cfg.clone(), theta_initial, rounds, stopped_at_cap })
}
