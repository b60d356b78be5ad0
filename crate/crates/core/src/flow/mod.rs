//! Ricci flow `dg/dt = -2 Ric(g)` (optionally volume normalized) of diagonal
//! left-invariant metrics, integrated in the log coefficients `u_i = ln g_i`.

pub mod analysis;
pub mod integrator;
pub mod monitors;
pub mod product;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use analysis::{asymptotic_profile, classify_singularity, AsymptoticProfile, SingularityType};
pub use monitors::{monitors_for, Monitor, MonitorSeries};
pub use product::{product_flow, product_metric, validity_interval, FactorKind, ProductGeometry};

use crate::curvature::{CurvatureModel, CurvatureReport, DiagonalMetric};
use crate::diagonalization::{frame_constants, param_count, Branch};
use crate::error::{Error, Result};
use crate::lie_algebra::{build_structure_constants, GeometrySpec, StructureConstants};
use crate::scalar::Real;
use integrator::{dopri5, Control, OdeOptions, OdeOutcome};

/// Off-diagonal Ricci entries larger than this, relative to
/// `max(1, max_i |Ric(Ybar_i, Ybar_i)|)`, mean the metric left the diagonal family.
pub const OFFDIAG_TOL: f64 = 1e-9;
/// Number of trailing accepted steps used to extrapolate the blowup time.
pub const BLOWUP_FIT_POINTS: usize = 10;
/// On step underflow, curvature growth since `t = 0` at or above this factor
/// counts as a blowup.
pub const BLOWUP_GROWTH: f64 = 1e4;

/// What the flow evolves on: Lie-group structure constants in the chosen
/// frame, or a product of space forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Geometry<T> {
    Lie(StructureConstants<T>),
    Product(ProductGeometry),
}

impl<T: Real> CurvatureModel<T> for Geometry<T> {
    fn curvature(&self, g: &DiagonalMetric<T>) -> Result<CurvatureReport<T>> {
        match self {
            Geometry::Lie(c) => c.curvature(g),
            Geometry::Product(p) => p.curvature(g),
        }
    }
}

/// A proposition branch together with the frame parameters `a_1..a_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Family<T> {
    pub branch: Branch,
    pub params: Vec<T>,
}

impl<T: Real> Family<T> {
    pub fn new(branch: Branch, a: &[T]) -> Result<Self> {
        let n = param_count(branch.class());
        if a.len() > n {
            return Err(Error::InvalidParameter(format!(
                "{branch} takes at most {n} frame parameters, got {}",
                a.len()
            )));
        }
        let mut params = vec![T::zero(); n];
        params[..a.len()].copy_from_slice(a);
        Ok(Family { branch, params })
    }

    /// The A7 family with `[Y_2, Y_3] = alpha Y_1`-type coupling, realized by `a_2 = alpha`.
    pub fn p6ii(alpha: T) -> Self {
        let mut params = vec![T::zero(); 6];
        params[1] = alpha;
        Family {
            branch: Branch::P6ii,
            params,
        }
    }

    /// `alpha` of P6.ii.
    pub fn alpha(&self) -> Option<T> {
        (self.branch == Branch::P6ii).then(|| self.params[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowProblem<T> {
    pub spec: GeometrySpec<T>,
    pub initial: DiagonalMetric<T>,
    pub normalized: bool,
    pub t_end: T,
    pub family: Option<Family<T>>,
}

impl<T: Real> FlowProblem<T> {
    pub fn new(spec: GeometrySpec<T>, initial: DiagonalMetric<T>, t_end: T) -> Result<Self> {
        let p = FlowProblem {
            spec,
            initial,
            normalized: false,
            t_end,
            family: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// A B-class problem starting from the metric its radii describe.
    pub fn product(spec: GeometrySpec<T>, t_end: T) -> Result<Self> {
        spec.validate()?;
        let initial = ProductGeometry::new(spec.class)?.initial_metric(&spec.radii)?;
        Self::new(spec, initial, t_end)
    }

    pub fn with_family(mut self, family: Family<T>) -> Self {
        self.family = Some(family);
        self
    }

    pub fn normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        DiagonalMetric::from_array(self.initial.g)?;
        if !(self.t_end > T::zero() && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive and finite, got {}",
                self.t_end
            )));
        }
        if let Some(f) = &self.family {
            if f.branch.class() != self.spec.class {
                return Err(Error::UnknownFamily(format!(
                    "{} does not belong to {}",
                    f.branch, self.spec.class
                )));
            }
        }
        if !self.spec.class.is_lie_group() {
            // the product model assumes each factor is a rescaled space form
            let expected =
                ProductGeometry::new(self.spec.class)?.initial_metric(&self.spec.radii)?;
            for i in 0..4 {
                let (x, y) = (self.initial.g[i], expected.g[i]);
                if (x - y).abs() > T::eps_times(64.0) * y {
                    return Err(Error::InvalidParameter(format!(
                        "{} initial metric must be the radius layout {:?}",
                        self.spec.class, expected.g
                    )));
                }
            }
        }
        Ok(())
    }

    /// Frame parameters of the family (empty without one).
    pub fn frame_params(&self) -> &[T] {
        self.family
            .as_ref()
            .map(|f| f.params.as_slice())
            .unwrap_or(&[])
    }

    pub fn geometry(&self) -> Result<Geometry<T>> {
        if !self.spec.class.is_lie_group() {
            return Ok(Geometry::Product(ProductGeometry::new(self.spec.class)?));
        }
        let params = self.frame_params();
        if param_count(self.spec.class) == 0 {
            return Ok(Geometry::Lie(build_structure_constants(&self.spec)?));
        }
        Ok(Geometry::Lie(frame_constants(&self.spec, params)?))
    }

    pub fn monitors(&self) -> Result<Vec<Monitor>> {
        monitors_for(&self.spec, self.family.as_ref().map(|f| f.branch))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    /// Record every `sample_stride`-th accepted step (checkpoints, the first
    /// and the last state are always recorded).
    pub sample_stride: usize,
    /// Times that must appear among the samples.
    pub checkpoints: Vec<T>,
    pub max_steps: usize,
}

impl<T: Real> IntegrateOptions<T> {
    pub fn for_horizon(t_end: T) -> Self {
        IntegrateOptions {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_step: t_end / T::lit(100.0),
            sample_stride: 1,
            checkpoints: Vec::new(),
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub t: T,
    pub metric: [T; 4],
    pub curvature_norm: T,
    pub scalar: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Termination<T> {
    ReachedEnd,
    Blowup { t_est: T },
    StepUnderflow { t: T },
}

impl<T: Real> Termination<T> {
    pub fn t_est(&self) -> Option<T> {
        match self {
            Termination::Blowup { t_est } => Some(*t_est),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::ReachedEnd => "reached_t_end",
            Termination::Blowup { .. } => "blowup_detected",
            Termination::StepUnderflow { .. } => "step_underflow",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory<T> {
    pub samples: Vec<Sample<T>>,
    /// One series per monitor, parallel to `samples`.
    pub monitors: Vec<MonitorSeries<T>>,
    pub termination: Termination<T>,
    pub rel_tol: T,
    pub abs_tol: T,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl<T: Real> FlowTrajectory<T> {
    pub fn last(&self) -> Option<&Sample<T>> {
        self.samples.last()
    }

    pub fn monitor(&self, m: Monitor) -> Option<&MonitorSeries<T>> {
        self.monitors.iter().find(|s| s.monitor == m)
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

fn check_diagonal<T: Real>(r: &CurvatureReport<T>, t: T) -> Result<()> {
    let scale = r.diagonal().iter().fold(T::one(), |m, x| m.max(x.abs()));
    let off = r.max_offdiag();
    if off > T::lit(OFFDIAG_TOL) * scale {
        return Err(Error::OffDiagonalRicci {
            t: t.to_f64_lossy(),
            magnitude: off.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `d(ln g_i)/dt = -2 Ric(Ybar_i, Ybar_i)`, plus `r/2` when normalized.
fn log_rate<T: Real>(r: &CurvatureReport<T>, normalized: bool) -> [T; 4] {
    let shift = if normalized {
        r.scalar / T::lit(2.0)
    } else {
        T::zero()
    };
    let d = r.diagonal();
    d.map(|x| T::lit(-2.0) * x + shift)
}

/// `dg_i/dt = -2 Ric(Y_i, Y_i)` (plus `r/2 g_i` when normalized). Fails when
/// the Ricci tensor is not diagonal in the frame.
pub fn rhs<T: Real, M: CurvatureModel<T> + ?Sized>(
    model: &M,
    g: &DiagonalMetric<T>,
    normalized: bool,
) -> Result<[T; 4]> {
    let r = model.curvature(g)?;
    check_diagonal(&r, T::zero())?;
    let rate = log_rate(&r, normalized);
    Ok([
        rate[0] * g.g[0],
        rate[1] * g.g[1],
        rate[2] * g.g[2],
        rate[3] * g.g[3],
    ])
}

/// Integrates a flow problem with Dormand–Prince 5(4).
///
/// Stops early when the curvature norm exceeds `1 / (10 rel_tol)`, reporting
/// a blowup time extrapolated from `1/K` over the last accepted steps.
pub fn integrate<T: Real>(
    problem: &FlowProblem<T>,
    opts: &IntegrateOptions<T>,
) -> Result<FlowTrajectory<T>> {
    problem.validate()?;
    if !(opts.rel_tol > T::zero() && opts.abs_tol > T::zero()) {
        return Err(Error::InvalidParameter(
            "tolerances must be positive".into(),
        ));
    }
    let geom = problem.geometry()?;
    let monitors = problem.monitors()?;
    let normalized = problem.normalized;
    let r0 = geom.curvature(&problem.initial)?;
    check_diagonal(&r0, T::zero())?;

    let u0 = problem.initial.g.map(|x| x.ln());
    let mut ode = OdeOptions::new(opts.rel_tol, opts.abs_tol, problem.t_end);
    if opts.max_step > T::zero() {
        ode.max_step = opts.max_step;
    }
    ode.max_steps = opts.max_steps;
    ode.checkpoints = opts.checkpoints.clone();
    let (rtol, atol) = (opts.rel_tol, opts.abs_tol);
    // error in u_i is relative error in g_i; abs_tol applies to g_i itself
    let scale = move |u: &[T; 4], v: &[T; 4]| -> [T; 4] {
        let mut s = [T::zero(); 4];
        for i in 0..4 {
            s[i] = rtol + atol / u[i].max(v[i]).exp();
        }
        s
    };

    let k_limit = T::one() / (T::lit(10.0) * opts.rel_tol);
    let stride = opts.sample_stride.max(1);
    let mut samples: Vec<Sample<T>> = Vec::new();
    let mut recent: VecDeque<(T, T)> = VecDeque::with_capacity(BLOWUP_FIT_POINTS + 1);
    let mut last_state: Option<Sample<T>> = None;
    let mut k_first = T::zero();
    let mut step = 0usize;
    let mut blowup = false;

    let (outcome, stats) = dopri5(
        |t, u: &[T; 4]| {
            let g = DiagonalMetric::from_array(u.map(|x| x.exp()))?;
            let r = geom.curvature(&g)?;
            check_diagonal(&r, t)?;
            Ok(log_rate(&r, normalized))
        },
        T::zero(),
        u0,
        &ode,
        scale,
        |t, u, at_checkpoint| {
            let g = DiagonalMetric::from_array(u.map(|x| x.exp()))?;
            let r = geom.curvature(&g)?;
            let s = Sample {
                t,
                metric: g.g,
                curvature_norm: r.curvature_norm(),
                scalar: r.scalar,
            };
            if samples.is_empty() {
                k_first = s.curvature_norm;
            }
            if recent.len() == BLOWUP_FIT_POINTS {
                recent.pop_front();
            }
            recent.push_back((t, s.curvature_norm));
            let over = s.curvature_norm > k_limit;
            if samples.is_empty() || at_checkpoint || step % stride == 0 || over {
                samples.push(s);
                last_state = None;
            } else {
                last_state = Some(s);
            }
            step += 1;
            if over {
                blowup = true;
                return Ok(Control::Stop);
            }
            Ok(Control::Continue)
        },
    )?;
    if let Some(s) = last_state {
        samples.push(s);
    }
    let k_last = samples
        .last()
        .map(|s| s.curvature_norm)
        .unwrap_or(T::zero());
    let extrapolate = |fallback: T| {
        let pts: Vec<(T, T)> = recent.iter().copied().filter(|p| p.1 > T::zero()).collect();
        analysis::blowup_time(&pts).unwrap_or(fallback)
    };
    let termination = match outcome {
        OdeOutcome::Finished => Termination::ReachedEnd,
        OdeOutcome::Stopped => {
            debug_assert!(blowup);
            let t_last = samples.last().map(|s| s.t).unwrap_or(T::zero());
            Termination::Blowup {
                t_est: extrapolate(t_last).max(t_last),
            }
        }
        OdeOutcome::Underflow { t } => {
            if k_last >= T::lit(BLOWUP_GROWTH) * k_first && k_last > T::zero() {
                Termination::Blowup {
                    t_est: extrapolate(t).max(t),
                }
            } else {
                Termination::StepUnderflow { t }
            }
        }
    };
    let monitors = monitors
        .into_iter()
        .map(|m| MonitorSeries {
            monitor: m,
            values: samples.iter().map(|s| m.eval(&s.metric)).collect(),
        })
        .collect();
    Ok(FlowTrajectory {
        samples,
        monitors,
        termination,
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_algebra::GeometryClass::*;

    fn unit() -> DiagonalMetric<f64> {
        DiagonalMetric::unit()
    }

    #[test]
    fn rhs_examples() {
        let c = build_structure_constants(&GeometrySpec::new(A2).with_k(2.0_f64)).unwrap();
        let d = rhs(&c, &unit(), false).unwrap();
        assert!(d[..3].iter().all(|x| x.abs() < 1e-14));
        assert!((d[3] - 28.0).abs() < 1e-13);
        let flat = build_structure_constants(&GeometrySpec::<f64>::new(A1)).unwrap();
        assert_eq!(
            rhs(
                &flat,
                &DiagonalMetric::new(1.0, 2.0, 3.0, 4.0).unwrap(),
                true
            )
            .unwrap(),
            [0.0; 4]
        );
        let s4 = ProductGeometry::new(B9).unwrap();
        let g = s4.initial_metric(&[1.7_f64]).unwrap();
        let d = rhs(&s4, &g, true).unwrap();
        assert!(d.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn a4_unit_metric() {
        let p = FlowProblem::new(GeometrySpec::new(A4), unit(), 1.0).unwrap();
        let traj = integrate(&p, &IntegrateOptions::for_horizon(1.0)).unwrap();
        let s = traj.last().unwrap();
        assert_eq!(s.t, 1.0);
        let c = 4f64.cbrt();
        for (x, y) in s.metric.iter().zip([c, 1.0 / c, 1.0, c]) {
            assert!((x - y).abs() < 1e-9 * y, "{x} vs {y}");
        }
        assert_eq!(traj.termination, Termination::ReachedEnd);
    }

    #[test]
    fn a10_collapse() {
        let spec = GeometrySpec::new(A10);
        let p = FlowProblem::new(spec, unit(), 2.0)
            .unwrap()
            .with_family(Family::new(Branch::P9iii, &[0.2, 0.5, 0.9]).unwrap());
        let traj = integrate(&p, &IntegrateOptions::for_horizon(2.0)).unwrap();
        let t_est = traj.termination.t_est().expect("blowup");
        assert!((t_est - 1.0).abs() < 1e-3, "{t_est}");
    }

    #[test]
    fn family_must_match_class() {
        let p = FlowProblem::new(GeometrySpec::new(A6), unit(), 1.0)
            .unwrap()
            .with_family(Family::p6ii(0.5));
        assert!(p.validate().is_err());
    }

    #[test]
    fn product_initial_layout_enforced() {
        let spec = GeometrySpec::new(B2).with_radii(&[2.0]);
        assert!(FlowProblem::new(spec.clone(), unit(), 1.0).is_err());
        let p = FlowProblem::product(spec, 1.0).unwrap();
        assert_eq!(p.initial.g, [4.0, 4.0, 1.0, 1.0]);
    }

    #[test]
    fn checkpoints_are_sampled() {
        let p = FlowProblem::new(GeometrySpec::new(A6), unit(), 10.0).unwrap();
        let mut opts = IntegrateOptions::for_horizon(10.0);
        opts.sample_stride = 1000;
        opts.checkpoints = vec![0.5, 3.0];
        let traj = integrate(&p, &opts).unwrap();
        let times = traj.times();
        assert!(times.contains(&0.5) && times.contains(&3.0) && times.contains(&10.0));
        assert_eq!(traj.monitors.len(), 2);
        assert_eq!(traj.monitors[0].values.len(), traj.samples.len());
    }
}
