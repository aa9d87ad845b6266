use crate::error::Result;
use num_complex::Complex64 as C64;

/// Fixed-step RK4 on a complex vector from `t = 0` to `t_end`. Steps are
/// at most `dt_max` and land exactly on every time in `events` (ascending);
/// `on_event(k, t, y)` is called there.
pub(crate) fn integrate(
    mut y: Vec<C64>,
    t_end: f64,
    dt_max: f64,
    events: &[f64],
    mut rhs: impl FnMut(f64, &[C64], &mut [C64]),
    mut on_event: impl FnMut(usize, f64, &[C64]) -> Result<()>,
) -> Result<(Vec<C64>, usize)> {
    let n = y.len();
    let mut k1 = vec![C64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut targets: Vec<(f64, Option<usize>)> = events.iter().enumerate().map(|(k, &e)| (e.min(t_end), Some(k))).collect();
    targets.push((t_end, None));
    for (target, id) in targets {
        let span = target - t;
        if span > 0.0 {
            let m = (span / dt_max).ceil().max(1.0) as usize;
            let h = span / m as f64;
            for i in 0..m {
                let t0 = t + h * i as f64;
                rhs(t0, &y, &mut k1);
                for j in 0..n {
                    tmp[j] = y[j] + k1[j] * (h / 2.0);
                }
                rhs(t0 + h / 2.0, &tmp, &mut k2);
                for j in 0..n {
                    tmp[j] = y[j] + k2[j] * (h / 2.0);
                }
                rhs(t0 + h / 2.0, &tmp, &mut k3);
                for j in 0..n {
                    tmp[j] = y[j] + k3[j] * h;
                }
                rhs(t0 + h, &tmp, &mut k4);
                for j in 0..n {
                    y[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
                }
            }
            steps += m;
            t = target;
        }
        if let Some(k) = id {
            on_event(k, t, &y)?;
        }
    }
    Ok((y, steps))
}
