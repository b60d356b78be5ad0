//! Dormand–Prince 5(4) with a PI step-size controller.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// What the observer wants after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeOutcome<T> {
    /// Reached `t_end`.
    Finished,
    /// The observer asked to stop.
    Stopped,
    /// The step size fell below round-off at `t`.
    Underflow { t: T },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub t_end: T,
    pub max_step: T,
    pub initial_step: Option<T>,
    pub max_steps: usize,
    /// Times the integrator must land on exactly (sorted or not; values outside
    /// `(t0, t_end]` are ignored).
    pub checkpoints: Vec<T>,
}

impl<T: Real> OdeOptions<T> {
    pub fn new(rel_tol: T, abs_tol: T, t_end: T) -> Self {
        OdeOptions {
            rel_tol,
            abs_tol,
            t_end,
            max_step: t_end.abs(),
            initial_step: None,
            max_steps: 2_000_000,
            checkpoints: Vec::new(),
        }
    }
}

/// Error scale `abs_tol + rel_tol * max(|y|, |y_new|)`.
pub fn mixed_scale<T: Real, const N: usize>(
    rel_tol: T,
    abs_tol: T,
) -> impl Fn(&[T; N], &[T; N]) -> [T; N] {
    move |y, y_new| {
        let mut s = [T::zero(); N];
        for i in 0..N {
            s[i] = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
        }
        s
    }
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn combo<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * T::lit(*c);
        for i in 0..N {
            out[i] = out[i] + hc * k[i];
        }
    }
    out
}

fn all_finite<T: Real, const N: usize>(y: &[T; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Stage failures that just mean the trial step was too long.
fn recoverable(e: &Error) -> bool {
    matches!(e, Error::NonPositiveMetric { .. })
}

/// Integrates `y' = f(t, y)` from `t0` to `opts.t_end`.
///
/// `observer(t, y, at_checkpoint)` runs after every accepted step (and once at
/// `t0` with `at_checkpoint = false`). Stage evaluations that fail with a
/// recoverable error or produce non-finite values reject the step.
pub fn dopri5<T, const N: usize, F, S, O>(
    mut f: F,
    t0: T,
    y0: [T; N],
    opts: &OdeOptions<T>,
    scale: S,
    mut observer: O,
) -> Result<(OdeOutcome<T>, OdeStats)>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
    S: Fn(&[T; N], &[T; N]) -> [T; N],
    O: FnMut(T, &[T; N], bool) -> Result<Control>,
{
    let mut stats = OdeStats::default();
    let t_end = opts.t_end;
    if !(t_end > t0) {
        return Err(Error::Integration {
            t: t0.to_f64_lossy(),
            reason: "t_end must exceed the start time".into(),
        });
    }
    let mut checkpoints: Vec<T> = opts
        .checkpoints
        .iter()
        .copied()
        .filter(|c| *c > t0 && *c < t_end)
        .collect();
    checkpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    checkpoints.dedup();
    let mut next_cp = 0usize;

    let max_step = if opts.max_step > T::zero() {
        opts.max_step.min(t_end - t0)
    } else {
        t_end - t0
    };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;
    if !all_finite(&k1) {
        return Err(Error::Integration {
            t: t.to_f64_lossy(),
            reason: "non-finite derivative at the initial state".into(),
        });
    }
    if observer(t, &y, false)? == Control::Stop {
        return Ok((OdeOutcome::Stopped, stats));
    }

    let norm = |v: &[T; N], sc: &[T; N]| -> T {
        let mut s = T::zero();
        for i in 0..N {
            let r = v[i] / sc[i];
            s = s + r * r;
        }
        (s / T::lit(N as f64)).sqrt()
    };

    let mut h = match opts.initial_step {
        Some(h0) if h0 > T::zero() => h0.min(max_step),
        _ => {
            // Hairer's starting-step heuristic
            let sc = scale(&y, &y);
            let d0 = norm(&y, &sc);
            let d1 = norm(&k1, &sc);
            let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
                T::lit(1e-6)
            } else {
                T::lit(0.01) * d0 / d1
            };
            let h0 = h0.min(max_step);
            let y1 = combo(&y, h0, &[(1.0, &k1)]);
            let d2 = match f(t + h0, &y1) {
                Ok(k) if all_finite(&k) => {
                    stats.evaluations += 1;
                    let mut diff = [T::zero(); N];
                    for i in 0..N {
                        diff[i] = k[i] - k1[i];
                    }
                    norm(&diff, &sc) / h0
                }
                Ok(_) => T::infinity(),
                Err(e) if recoverable(&e) => T::infinity(),
                Err(e) => return Err(e),
            };
            let dm = d1.max(d2);
            let h1 = if dm <= T::lit(1e-15) {
                (h0 * T::lit(1e-3)).max(T::lit(1e-6))
            } else {
                (T::lit(0.01) / dm).powf(T::lit(0.2))
            };
            (T::lit(100.0) * h0).min(h1).min(max_step)
        }
    };

    let expo1 = T::lit(0.2 - BETA * 0.75);
    let mut fac_old = T::lit(1e-4);
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration {
                t: t.to_f64_lossy(),
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        let min_step = T::eps_times(16.0) * t.abs().max(T::one()) * T::lit(0.0625);
        if h < min_step {
            return Ok((OdeOutcome::Underflow { t }, stats));
        }
        // land exactly on the next checkpoint or on t_end
        let target = if next_cp < checkpoints.len() {
            checkpoints[next_cp]
        } else {
            t_end
        };
        let mut hit = false;
        let mut step = h.min(max_step);
        if t + step >= target || (target - t - step) < T::eps_times(8.0) * target.abs() {
            step = target - t;
            hit = true;
        }

        let stages = (|| -> Result<Option<([T; N], [T; N], [T; N])>> {
            let mut eval = |tt: T, yy: &[T; N]| -> Result<Option<[T; N]>> {
                stats.evaluations += 1;
                match f(tt, yy) {
                    Ok(k) if all_finite(&k) => Ok(Some(k)),
                    Ok(_) => Ok(None),
                    Err(e) if recoverable(&e) => Ok(None),
                    Err(e) => Err(e),
                }
            };
            macro_rules! stage {
                ($tt:expr, $yy:expr) => {
                    match eval($tt, &$yy)? {
                        Some(k) => k,
                        None => return Ok(None),
                    }
                };
            }
            let y2 = combo(&y, step, &[(A21, &k1)]);
            let k2 = stage!(t + step * T::lit(C2), y2);
            let y3 = combo(&y, step, &[(A31, &k1), (A32, &k2)]);
            let k3 = stage!(t + step * T::lit(C3), y3);
            let y4 = combo(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = stage!(t + step * T::lit(C4), y4);
            let y5 = combo(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = stage!(t + step * T::lit(C5), y5);
            let y6 = combo(
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = stage!(t + step, y6);
            let y_new = combo(
                &y,
                step,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            if !all_finite(&y_new) {
                return Ok(None);
            }
            let k7 = stage!(t + step, y_new);
            let mut err = [T::zero(); N];
            for i in 0..N {
                err[i] = step
                    * (T::lit(E1) * k1[i]
                        + T::lit(E3) * k3[i]
                        + T::lit(E4) * k4[i]
                        + T::lit(E5) * k5[i]
                        + T::lit(E6) * k6[i]
                        + T::lit(E7) * k7[i]);
            }
            Ok(Some((y_new, k7, err)))
        })()?;

        let Some((y_new, k7, err_vec)) = stages else {
            stats.rejected += 1;
            h = step * T::lit(0.1);
            last_rejected = true;
            continue;
        };

        let sc = scale(&y, &y_new);
        let err = norm(&err_vec, &sc);
        let fac11 = err.powf(expo1);
        let fac = (fac11 / fac_old.powf(T::lit(BETA)) / T::lit(SAFETY))
            .max(T::one() / T::lit(FAC_MAX))
            .min(T::one() / T::lit(FAC_MIN));
        if err <= T::one() {
            fac_old = err.max(T::lit(1e-4));
            stats.accepted += 1;
            t = if hit { target } else { t + step };
            y = y_new;
            k1 = k7;
            let at_cp = hit && next_cp < checkpoints.len();
            if at_cp {
                next_cp += 1;
            }
            if observer(t, &y, at_cp)? == Control::Stop {
                return Ok((OdeOutcome::Stopped, stats));
            }
            if hit && !at_cp {
                return Ok((OdeOutcome::Finished, stats));
            }
            let mut h_new = step / fac;
            if last_rejected {
                h_new = h_new.min(step);
            }
            last_rejected = false;
            // a step shortened to hit a target should not shrink the next one
            h = if hit { h_new.max(h) } else { h_new };
        } else {
            stats.rejected += 1;
            h = step / (T::one() / fac11.min(T::lit(1.0 / FAC_MIN)) * T::lit(SAFETY)).max(T::one());
            h = h.min(step / T::lit(1.0 / FAC_MIN).min((fac11 / T::lit(SAFETY)).max(T::one())));
            last_rejected = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::new(1e-10, 1e-12, 5.0);
        let mut last = (0.0, [1.0]);
        let (outcome, stats) = dopri5(
            |_t, y: &[f64; 1]| Ok([-y[0]]),
            0.0,
            [1.0],
            &opts,
            mixed_scale(1e-10, 1e-12),
            |t, y, _| {
                last = (t, *y);
                Ok(Control::Continue)
            },
        )
        .unwrap();
        assert_eq!(outcome, OdeOutcome::Finished);
        assert_eq!(last.0, 5.0);
        assert!((last.1[0] - (-5.0f64).exp()).abs() < 1e-11);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn harmonic_oscillator_with_checkpoints() {
        let mut opts = OdeOptions::new(1e-11, 1e-13, 10.0);
        opts.checkpoints = vec![1.0, 2.5, 7.0, 20.0];
        let mut seen = Vec::new();
        dopri5(
            |_t, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            &opts,
            mixed_scale(1e-11, 1e-13),
            |t, y, cp| {
                if cp {
                    seen.push((t, y[0]));
                }
                Ok(Control::Continue)
            },
        )
        .unwrap();
        assert_eq!(
            seen.iter().map(|s| s.0).collect::<Vec<_>>(),
            vec![1.0, 2.5, 7.0]
        );
        for (t, x) in seen {
            assert!((x - f64::sin(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn finite_time_blowup_underflows() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let opts = OdeOptions::new(1e-10, 1e-12, 2.0);
        let (outcome, _) = dopri5(
            |_t, y: &[f64; 1]| Ok([y[0] * y[0]]),
            0.0,
            [1.0],
            &opts,
            mixed_scale(1e-10, 1e-12),
            |_, _, _| Ok(Control::Continue),
        )
        .unwrap();
        match outcome {
            OdeOutcome::Underflow { t } => assert!((t - 1.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn observer_can_stop() {
        let opts = OdeOptions::new(1e-8, 1e-10, 10.0);
        let (outcome, _) = dopri5(
            |_t, _y: &[f64; 1]| Ok([1.0]),
            0.0,
            [0.0],
            &opts,
            mixed_scale(1e-8, 1e-10),
            |t, _, _| {
                Ok(if t > 1.0 {
                    Control::Stop
                } else {
                    Control::Continue
                })
            },
        )
        .unwrap();
        assert_eq!(outcome, OdeOutcome::Stopped);
    }
}
