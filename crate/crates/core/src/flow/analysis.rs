//! Singularity typing and power-law fits on finished trajectories.

use serde::{Deserialize, Serialize};

use super::{FlowTrajectory, Termination};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_SAMPLES: usize = 50;
/// Largest relative spread of the scale-invariant curvature product accepted
/// as "bounded" over the fit window.
pub const MAX_VARIATION: f64 = 0.2;
/// Shortest horizon [`asymptotic_profile`] will fit over.
pub const MIN_FIT_TIME: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SingularityType<T> {
    TypeI { t_est: T },
    TypeIII,
    ImmortalFlat,
    Inconclusive,
}

/// `(max - min) / max` of a non-empty set of positive values.
fn variation<T: Real>(xs: &[T]) -> T {
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if hi <= T::zero() {
        return T::infinity();
    }
    (hi - lo) / hi
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Option<(T, T, T)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = T::lit(n as f64);
    let mx = x.iter().fold(T::zero(), |s, v| s + *v) / nf;
    let my = y.iter().fold(T::zero(), |s, v| s + *v) / nf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for i in 0..n {
        sxx = sxx + (x[i] - mx) * (x[i] - mx);
        sxy = sxy + (x[i] - mx) * (y[i] - my);
    }
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = T::zero();
    for i in 0..n {
        let r = y[i] - (intercept + slope * x[i]);
        ss = ss + r * r;
    }
    Some((slope, intercept, (ss / nf).sqrt()))
}

/// Classifies the end of a trajectory.
///
/// Finite-time blowups are Type I when `(T - t) K` varies by less than 20%
/// over one decade of `T - t`; the decade nearest the stop is skipped because
/// there the error of the extrapolated `T` dominates. Immortal flows are
/// Type III when `t K` varies by less than 20% over `[t_end / 10, t_end]`.
pub fn classify_singularity<T: Real>(traj: &FlowTrajectory<T>) -> Result<SingularityType<T>> {
    let n = traj.samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            need: MIN_SAMPLES,
        });
    }
    if traj.samples.iter().all(|s| s.curvature_norm < traj.abs_tol) {
        return Ok(SingularityType::ImmortalFlat);
    }
    match traj.termination {
        Termination::Blowup { t_est } => {
            let tau_last = t_est - traj.samples[n - 1].t;
            if !(tau_last > T::zero()) {
                return Ok(SingularityType::Inconclusive);
            }
            let (lo, hi) = (tau_last * T::lit(10.0), tau_last * T::lit(100.0));
            let window: Vec<T> = traj
                .samples
                .iter()
                .filter(|s| {
                    let tau = t_est - s.t;
                    tau >= lo && tau <= hi
                })
                .map(|s| (t_est - s.t) * s.curvature_norm)
                .collect();
            if window.len() >= 3 && variation(&window) < T::lit(MAX_VARIATION) {
                Ok(SingularityType::TypeI { t_est })
            } else {
                Ok(SingularityType::Inconclusive)
            }
        }
        Termination::ReachedEnd => {
            let t_end = traj.samples[n - 1].t;
            let window: Vec<T> = traj
                .samples
                .iter()
                .filter(|s| s.t >= t_end / T::lit(10.0))
                .map(|s| s.t * s.curvature_norm)
                .collect();
            if window.len() >= 3 && variation(&window) < T::lit(MAX_VARIATION) {
                Ok(SingularityType::TypeIII)
            } else {
                Ok(SingularityType::Inconclusive)
            }
        }
        Termination::StepUnderflow { .. } => Ok(SingularityType::Inconclusive),
    }
}

/// Power-law exponents over the final decade of an immortal trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticProfile<T> {
    pub window: (T, T),
    /// Slopes of `ln g_i` against `ln t`.
    pub exponents: [T; 4],
    pub residuals: [T; 4],
    /// Slope of `ln K` against `ln t`; `None` when the curvature vanishes.
    pub curvature: Option<T>,
    pub curvature_residual: Option<T>,
}

pub fn asymptotic_profile<T: Real>(traj: &FlowTrajectory<T>) -> Result<AsymptoticProfile<T>> {
    if traj.termination != Termination::ReachedEnd {
        return Err(Error::FiniteTime(format!(
            "flow stopped with {:?}",
            traj.termination
        )));
    }
    let last = traj
        .samples
        .last()
        .ok_or(Error::TooFewSamples { got: 0, need: 3 })?;
    if last.t < T::lit(MIN_FIT_TIME) {
        return Err(Error::InvalidParameter(format!(
            "fit needs a horizon of at least {MIN_FIT_TIME}, got {}",
            last.t
        )));
    }
    let t_end = last.t;
    let window: Vec<_> = traj
        .samples
        .iter()
        .filter(|s| s.t >= t_end / T::lit(10.0))
        .collect();
    if window.len() < 3 {
        return Err(Error::TooFewSamples {
            got: window.len(),
            need: 3,
        });
    }
    let lt: Vec<T> = window.iter().map(|s| s.t.ln()).collect();
    let mut exponents = [T::zero(); 4];
    let mut residuals = [T::zero(); 4];
    for i in 0..4 {
        let y: Vec<T> = window.iter().map(|s| s.metric[i].ln()).collect();
        let (m, _, r) = linear_fit(&lt, &y).expect("distinct sample times");
        exponents[i] = m;
        residuals[i] = r;
    }
    let flat = window.iter().any(|s| s.curvature_norm < traj.abs_tol);
    let (curvature, curvature_residual) = if flat {
        (None, None)
    } else {
        let y: Vec<T> = window.iter().map(|s| s.curvature_norm.ln()).collect();
        let (m, _, r) = linear_fit(&lt, &y).expect("distinct sample times");
        (Some(m), Some(r))
    };
    Ok(AsymptoticProfile {
        window: (t_end / T::lit(10.0), t_end),
        exponents,
        residuals,
        curvature,
        curvature_residual,
    })
}

/// Zero of the least-squares line through `(t, 1/K)`, evaluated around the
/// mean time of the points for conditioning.
pub fn blowup_time<T: Real>(points: &[(T, T)]) -> Option<T> {
    if points.len() < 2 {
        return None;
    }
    let tc = points.iter().fold(T::zero(), |s, p| s + p.0) / T::lit(points.len() as f64);
    let x: Vec<T> = points.iter().map(|p| p.0 - tc).collect();
    let y: Vec<T> = points.iter().map(|p| T::one() / p.1).collect();
    let (m, b, _) = linear_fit(&x, &y)?;
    if !(m < T::zero()) {
        return None;
    }
    Some(tc - b / m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_line() {
        let x = [0.0_f64, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (m, b, r) = linear_fit(&x, &y).unwrap();
        assert!((m - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && r < 1e-15);
    }

    #[test]
    fn blowup_extrapolation() {
        // K = 1/(1 - t)
        let pts: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let t = 0.9 + 0.009 * i as f64;
                (t, 1.0 / (1.0 - t))
            })
            .collect();
        assert!((blowup_time(&pts).unwrap() - 1.0).abs() < 1e-12);
        assert!(blowup_time(&[(0.0, 1.0), (1.0, 0.5)]).is_none());
    }
}
