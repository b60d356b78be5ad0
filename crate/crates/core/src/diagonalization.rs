//! Frames `Y_i` that diagonalize an initial metric, the off-diagonal Ricci
//! components they produce, and the conditions under which the flow keeps
//! the metric diagonal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curvature::{ricci_tensor, DiagonalMetric, PAIRS};
use crate::error::{Error, Result};
use crate::flow::integrator::{dopri5, mixed_scale, Control, OdeOptions};
use crate::flow::{integrate, Family, FlowProblem, IntegrateOptions, Termination};
use crate::lie_algebra::{
    build_structure_constants, transform_basis, FrameTransform, GeometryClass, GeometrySpec,
    StructureConstants,
};
use crate::scalar::Real;

/// Tolerance on the bracket coefficients `alpha, beta, gamma` and on the `a_i`.
pub const PARAM_TOL: f64 = 1e-12;
/// Relative tolerance on equalities between metric coefficients.
pub const LAMBDA_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    P1i,
    P1ii,
    P2,
    P3,
    P4,
    P5,
    P6i,
    P6ii,
    P7,
    P8i,
    P8ii,
    P9i,
    P9ii,
    P9iii,
}

impl Branch {
    pub const ALL: [Branch; 14] = [
        Branch::P1i,
        Branch::P1ii,
        Branch::P2,
        Branch::P3,
        Branch::P4,
        Branch::P5,
        Branch::P6i,
        Branch::P6ii,
        Branch::P7,
        Branch::P8i,
        Branch::P8ii,
        Branch::P9i,
        Branch::P9ii,
        Branch::P9iii,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Branch::P1i => "P1.i",
            Branch::P1ii => "P1.ii",
            Branch::P2 => "P2",
            Branch::P3 => "P3",
            Branch::P4 => "P4",
            Branch::P5 => "P5",
            Branch::P6i => "P6.i",
            Branch::P6ii => "P6.ii",
            Branch::P7 => "P7",
            Branch::P8i => "P8.i",
            Branch::P8ii => "P8.ii",
            Branch::P9i => "P9.i",
            Branch::P9ii => "P9.ii",
            Branch::P9iii => "P9.iii",
        }
    }

    /// Class-flavoured alias such as `A7ii`.
    pub fn alias(self) -> &'static str {
        match self {
            Branch::P1i => "A2i",
            Branch::P1ii => "A2ii",
            Branch::P2 => "A3",
            Branch::P3 => "A4",
            Branch::P4 => "A5",
            Branch::P5 => "A6",
            Branch::P6i => "A7i",
            Branch::P6ii => "A7ii",
            Branch::P7 => "A8",
            Branch::P8i => "A9i",
            Branch::P8ii => "A9ii",
            Branch::P9i => "A10i",
            Branch::P9ii => "A10ii",
            Branch::P9iii => "A10iii",
        }
    }

    pub fn class(self) -> GeometryClass {
        use GeometryClass::*;
        match self {
            Branch::P1i | Branch::P1ii => A2,
            Branch::P2 => A3,
            Branch::P3 => A4,
            Branch::P4 => A5,
            Branch::P5 => A6,
            Branch::P6i | Branch::P6ii => A7,
            Branch::P7 => A8,
            Branch::P8i | Branch::P8ii => A9,
            Branch::P9i | Branch::P9ii | Branch::P9iii => A10,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Serialized as its label.
impl Serialize for Branch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Branch {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Branch::ALL
            .iter()
            .copied()
            .find(|b| b.label().eq_ignore_ascii_case(t) || b.alias().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Number of free template parameters of a class.
pub fn param_count(class: GeometryClass) -> usize {
    use GeometryClass::*;
    match class {
        A2 | A3 | A4 | A5 | A6 | A7 | A8 => 6,
        A9 | A10 => 3,
        _ => 0,
    }
}

fn padded<T: Real>(class: GeometryClass, a: &[T]) -> Result<[T; 6]> {
    let n = param_count(class);
    if n == 0 {
        return Err(Error::UnsupportedClass(class));
    }
    if a.len() > n {
        return Err(Error::InvalidParameter(format!(
            "{class} takes at most {n} frame parameters, got {}",
            a.len()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "frame parameters must be finite".into(),
        ));
    }
    let mut out = [T::zero(); 6];
    out[..a.len()].copy_from_slice(a);
    Ok(out)
}

/// The class's frame template with `a_1..a_6` substituted. Row `i` holds the
/// components of `Y_i` on the canonical frame.
pub fn lambda_template<T: Real>(class: GeometryClass, a: &[T]) -> Result<FrameTransform<T>> {
    use GeometryClass::*;
    let p = padded(class, a)?;
    let [a1, a2, a3, a4, a5, a6] = p;
    let (o, z) = (T::one(), T::zero());
    let matrix = match class {
        A2 => [[o, z, z, z], [a1, o, z, z], [a2, a3, o, z], [a4, a5, a6, o]],
        A3 | A5 | A6 => [[o, a2, a3, z], [z, o, a1, z], [z, z, o, z], [a4, a5, a6, o]],
        A4 => [[o, a2, a3, z], [z, o, z, z], [z, a1, o, z], [a4, a5, a6, o]],
        A7 | A8 => [[o, a4, a5, a6], [z, o, a2, a3], [z, z, o, a1], [z, z, z, o]],
        A9 | A10 => [[o, z, z, z], [z, o, z, z], [z, z, o, z], [a1, a2, a3, o]],
        _ => return Err(Error::UnsupportedClass(class)),
    };
    Ok(FrameTransform {
        matrix,
        params: p[..param_count(class)].to_vec(),
        class: Some(class),
    })
}

/// Structure constants on the frame `Y_i` of the class template.
pub fn frame_constants<T: Real>(spec: &GeometrySpec<T>, a: &[T]) -> Result<StructureConstants<T>> {
    let c = build_structure_constants(spec)?;
    transform_basis(&c, &lambda_template(spec.class, a)?)
}

/// `Ric(Ybar_i, Ybar_j)` for `i < j`, in [`PAIRS`] order, through the
/// transform-then-Ricci pipeline.
pub fn offdiag_ricci<T: Real>(
    spec: &GeometrySpec<T>,
    a: &[T],
    lambda: &DiagonalMetric<T>,
) -> Result<[T; 6]> {
    let c = frame_constants(spec, a)?;
    Ok(ricci_tensor(&c, lambda)?.offdiag())
}

/// The bracket coefficients `(alpha, beta, gamma)` that the diagonality
/// conditions of a class are phrased in. `None` for A4, A9, A10.
pub fn bracket_coefficients<T: Real>(spec: &GeometrySpec<T>, a: &[T]) -> Result<Option<[T; 3]>> {
    use GeometryClass::*;
    let [a1, a2, a3, a4, a5, _] = padded(spec.class, a)?;
    let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
    let k = spec.k()?.unwrap_or(T::zero());
    let out = match spec.class {
        A2 => [
            (one - k) * a1,
            (one + two * k) * a3,
            (k + two) * a2 - (one + two * k) * a1 * a3,
        ],
        A3 => [
            a2,
            a2 * a3 - a1 * a2 * a2 - a1 - three * k * a3,
            a3 - three * k * a1 - a1 * a2,
        ],
        A5 => {
            let h = T::lit(1.5);
            [h * a1, h * a3 - a1, T::zero()]
        }
        A6 => [a2 - a1, T::zero(), T::zero()],
        A7 => [
            a2,
            a1 * a2 - a3 - a4,
            a1 - a1 * a2 * a2 + a2 * a3 + a2 * a4 - a5,
        ],
        A8 => [
            -a2,
            a1 * a2 - a3 + a4,
            -a1 - a1 * a2 * a2 + a2 * a3 - a2 * a4 + a5,
        ],
        _ => return Ok(None),
    };
    Ok(Some(out))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyVerdict {
    pub diagonal_preserved: bool,
    pub branch: Branch,
    pub conditions: Vec<Condition>,
}

fn near_zero<T: Real>(x: T) -> bool {
    x.abs() <= T::lit(PARAM_TOL)
}

fn rel_equal<T: Real>(x: T, y: T) -> bool {
    (x - y).abs() <= T::lit(LAMBDA_REL_TOL) * x.abs().max(y.abs())
}

fn cond(name: impl Into<String>, satisfied: bool) -> Condition {
    Condition {
        name: name.into(),
        satisfied,
    }
}

/// For A10 with exactly two equal coefficients among `lambda_1..3`, the free
/// index `i` and the equal pair `(j, k)` (zero based).
pub fn a10_pair<T: Real>(lambda: &DiagonalMetric<T>) -> Option<(usize, usize, usize)> {
    let l = &lambda.g;
    for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
        if rel_equal(l[j], l[k]) && !rel_equal(l[i], l[j]) {
            return Some((i, j, k));
        }
    }
    None
}

/// Evaluates the conditions of one specific branch.
pub fn branch_conditions<T: Real>(
    spec: &GeometrySpec<T>,
    branch: Branch,
    a: &[T],
    lambda: &DiagonalMetric<T>,
) -> Result<FamilyVerdict> {
    if branch.class() != spec.class {
        return Err(Error::UnknownFamily(format!(
            "{branch} does not belong to {}",
            spec.class
        )));
    }
    let p = padded(spec.class, a)?;
    let abc = bracket_coefficients(spec, a)?;
    let l = &lambda.g;
    let mut conditions = Vec::new();
    let zero_abc = |names: &[usize], out: &mut Vec<Condition>| {
        let v = abc.expect("class has bracket coefficients");
        for &i in names {
            out.push(cond(
                format!("{}=0", ["alpha", "beta", "gamma"][i]),
                near_zero(v[i]),
            ));
        }
    };
    match branch {
        Branch::P1i => {
            let k = spec.k()?.unwrap_or(T::zero());
            conditions.push(cond("k!=1", !near_zero(k - T::one())));
            zero_abc(&[0, 1, 2], &mut conditions);
        }
        Branch::P1ii => {
            let k = spec.k()?.unwrap_or(T::zero());
            conditions.push(cond("k=1", near_zero(k - T::one())));
            zero_abc(&[1, 2], &mut conditions);
        }
        Branch::P2 | Branch::P7 | Branch::P6i => zero_abc(&[0, 1, 2], &mut conditions),
        Branch::P3 => {}
        Branch::P4 => zero_abc(&[0, 1], &mut conditions),
        Branch::P5 => zero_abc(&[0], &mut conditions),
        Branch::P6ii => {
            zero_abc(&[1, 2], &mut conditions);
            let alpha = abc.expect("A7")[0];
            let q = T::one() - alpha * alpha;
            conditions.push(cond("|alpha|<1", q > T::zero()));
            conditions.push(cond(
                "lambda2=(1-alpha^2)lambda3",
                rel_equal(l[1], q * l[2]),
            ));
        }
        Branch::P8i => {
            conditions.push(cond("lambda1!=lambda2", !rel_equal(l[0], l[1])));
            for (i, name) in ["a1=0", "a2=0", "a3=0"].iter().enumerate() {
                conditions.push(cond(*name, near_zero(p[i])));
            }
        }
        Branch::P8ii => {
            conditions.push(cond("lambda1=lambda2", rel_equal(l[0], l[1])));
            conditions.push(cond("a1=0", near_zero(p[0])));
            conditions.push(cond("a2=0", near_zero(p[1])));
        }
        Branch::P9i => {
            conditions.push(cond(
                "lambda1,lambda2,lambda3 distinct",
                !rel_equal(l[0], l[1]) && !rel_equal(l[0], l[2]) && !rel_equal(l[1], l[2]),
            ));
            for (i, name) in ["a1=0", "a2=0", "a3=0"].iter().enumerate() {
                conditions.push(cond(*name, near_zero(p[i])));
            }
        }
        Branch::P9ii => match a10_pair(lambda) {
            Some((_, j, k)) => {
                conditions.push(cond(format!("lambda{}=lambda{}", j + 1, k + 1), true));
                conditions.push(cond(format!("a{}=0", j + 1), near_zero(p[j])));
                conditions.push(cond(format!("a{}=0", k + 1), near_zero(p[k])));
            }
            None => conditions.push(cond("exactly two of lambda1..3 equal", false)),
        },
        Branch::P9iii => {
            conditions.push(cond(
                "lambda1=lambda2=lambda3",
                rel_equal(l[0], l[1]) && rel_equal(l[0], l[2]),
            ));
        }
    }
    let diagonal_preserved = conditions.iter().all(|c| c.satisfied);
    Ok(FamilyVerdict {
        diagonal_preserved,
        branch,
        conditions,
    })
}

/// Decides which branch applies to `(a, lambda)` and whether its conditions
/// hold. When none holds, the verdict carries the branch selected by the
/// class parameter and the metric alone.
pub fn family_condition<T: Real>(
    spec: &GeometrySpec<T>,
    a: &[T],
    lambda: &DiagonalMetric<T>,
) -> Result<FamilyVerdict> {
    let branches = spec.class.branches();
    if branches.is_empty() {
        return Err(Error::UnsupportedClass(spec.class));
    }
    let mut first_applicable = None;
    for &b in branches {
        let v = branch_conditions(spec, b, a, lambda)?;
        if v.diagonal_preserved {
            return Ok(v);
        }
        // conditions on k and lambda alone pick the branch
        let structural = v
            .conditions
            .iter()
            .filter(|c| c.name.contains("lambda") || c.name.starts_with('k'))
            .all(|c| c.satisfied);
        if structural && first_applicable.is_none() && b != Branch::P6ii {
            first_applicable = Some(v);
        }
    }
    Ok(match first_applicable {
        Some(v) => v,
        None => branch_conditions(spec, branches[0], a, lambda)?,
    })
}

/// Quantity that must stay zero along the flow for branches whose diagonality
/// depends on a relation between metric coefficients.
pub fn constraint_residual<T: Real>(
    branch: Branch,
    a: &[T],
    g: &[T; 4],
    lambda0: &DiagonalMetric<T>,
) -> Option<T> {
    let rel = |x: T, y: T| (x - y).abs() / x.abs().max(y.abs());
    match branch {
        Branch::P6ii => {
            let alpha = a.get(1).copied().unwrap_or(T::zero());
            let q = T::one() - alpha * alpha;
            Some(rel(g[1], q * g[2]))
        }
        Branch::P8ii => Some(rel(g[0], g[1])),
        Branch::P9ii => a10_pair(lambda0).map(|(_, j, k)| rel(g[j], g[k])),
        Branch::P9iii => Some(rel(g[0], g[1]).max(rel(g[0], g[2]))),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport<T> {
    pub verdict: FamilyVerdict,
    pub initial_offdiag: [T; 6],
    /// Whether the flow was run (it is not when the conditions fail at `t = 0`).
    pub attempted: bool,
    /// Largest `|Ric(Ybar_i, Ybar_j)|`, `i < j`, over all samples.
    pub max_offdiag: T,
    /// Same, divided by `max(1, max_i |Ric(Ybar_i, Ybar_i)|)` at each sample.
    pub max_offdiag_relative: T,
    pub final_time: T,
    pub termination: Option<Termination<T>>,
    /// Largest relative violation of the branch's coefficient relation.
    pub constraint_drift: Option<T>,
    /// Largest relative difference between the full flow and the branch's
    /// reduced system at the comparison times.
    pub reduced_mismatch: Option<T>,
}

/// Runs the flow from a diagonal initial metric and records how far the Ricci
/// tensor strays from diagonal. Inputs violating the branch conditions are
/// reported with their `t = 0` off-diagonal components and no flow.
pub fn verify_preservation<T: Real>(
    spec: &GeometrySpec<T>,
    branch: Option<Branch>,
    a: &[T],
    lambda: &DiagonalMetric<T>,
    t_end: T,
    opts: Option<IntegrateOptions<T>>,
) -> Result<PreservationReport<T>> {
    let verdict = match branch {
        Some(b) => branch_conditions(spec, b, a, lambda)?,
        None => family_condition(spec, a, lambda)?,
    };
    let initial_offdiag = offdiag_ricci(spec, a, lambda)?;
    let mut report = PreservationReport {
        verdict: verdict.clone(),
        initial_offdiag,
        attempted: false,
        max_offdiag: initial_offdiag
            .iter()
            .fold(T::zero(), |m, x| m.max(x.abs())),
        max_offdiag_relative: T::zero(),
        final_time: T::zero(),
        termination: None,
        constraint_drift: None,
        reduced_mismatch: None,
    };
    if !verdict.diagonal_preserved {
        return Ok(report);
    }
    let family = Family::new(verdict.branch, a)?;
    let problem = FlowProblem::new(spec.clone(), *lambda, t_end)?.with_family(family);
    let mut opts = opts.unwrap_or_else(|| IntegrateOptions::for_horizon(t_end));
    let checks = log_times(t_end, 20);
    opts.checkpoints = checks.clone();
    let traj = integrate(&problem, &opts)?;
    let c = frame_constants(spec, a)?;
    let (mut worst, mut worst_rel, mut drift) = (T::zero(), T::zero(), T::zero());
    for s in &traj.samples {
        let g = DiagonalMetric::from_array(s.metric)?;
        let r = ricci_tensor(&c, &g)?;
        let off = r.max_offdiag();
        let diag = r.diagonal().iter().fold(T::one(), |m, x| m.max(x.abs()));
        worst = worst.max(off);
        worst_rel = worst_rel.max(off / diag);
        if let Some(d) = constraint_residual(verdict.branch, a, &s.metric, lambda) {
            drift = drift.max(d);
        }
    }
    report.attempted = true;
    report.max_offdiag = worst;
    report.max_offdiag_relative = worst_rel;
    report.final_time = traj.samples.last().map(|s| s.t).unwrap_or(T::zero());
    report.termination = Some(traj.termination);
    if constraint_residual(verdict.branch, a, &lambda.g, lambda).is_some() {
        report.constraint_drift = Some(drift);
    }
    report.reduced_mismatch = reduced_mismatch(verdict.branch, a, lambda, &traj, &opts)?;
    Ok(report)
}

/// `n` log-spaced times ending at `t_max`, three decades wide.
pub fn log_times<T: Real>(t_max: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|i| {
            let e = T::lit(-3.0 + 3.0 * i as f64 / (n.max(2) - 1) as f64);
            t_max * T::lit(10.0).powf(e)
        })
        .collect()
}

/// Compares the full flow with the reduced system written for the branch.
fn reduced_mismatch<T: Real>(
    branch: Branch,
    a: &[T],
    lambda: &DiagonalMetric<T>,
    traj: &crate::flow::FlowTrajectory<T>,
    opts: &IntegrateOptions<T>,
) -> Result<Option<T>> {
    let l = lambda.g;
    let two = T::lit(2.0);
    // (indices of the full metric carried by the reduced state, reconstruction)
    let run3 = |y0: [T; 3],
                f: &dyn Fn(&[T; 3]) -> [T; 3],
                full: &dyn Fn(&[T; 3]) -> [T; 4]|
     -> Result<Option<T>> {
        let t_last = traj.samples.last().map(|s| s.t).unwrap_or(T::zero());
        let times: Vec<T> = opts
            .checkpoints
            .iter()
            .copied()
            .filter(|t| *t <= t_last)
            .collect();
        if times.is_empty() {
            return Ok(None);
        }
        let ode = OdeOptions {
            checkpoints: times.clone(),
            ..OdeOptions::new(opts.rel_tol, opts.abs_tol, *times.last().unwrap())
        };
        let mut worst = T::zero();
        let mut err = None;
        dopri5(
            |_t, y: &[T; 3]| Ok(f(y)),
            T::zero(),
            y0,
            &ode,
            mixed_scale(opts.rel_tol, opts.abs_tol),
            |t, y, at_checkpoint| {
                if at_checkpoint {
                    match traj.samples.iter().find(|s| s.t == t) {
                        Some(s) => {
                            let g = full(y);
                            for m in 0..4 {
                                worst = worst.max((g[m] - s.metric[m]).abs() / s.metric[m].abs());
                            }
                        }
                        None => {
                            err = Some(Error::Integration {
                                t: t.to_f64_lossy(),
                                reason: "checkpoint missing from trajectory".into(),
                            })
                        }
                    }
                }
                Ok(Control::Continue)
            },
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(Some(worst))
    };
    match branch {
        Branch::P6ii => {
            let alpha = a.get(1).copied().unwrap_or(T::zero());
            let q = T::one() - alpha * alpha;
            run3(
                [l[0], l[1], l[3]],
                &|y| {
                    [
                        T::lit(4.0),
                        q * y[2] / y[1],
                        -q * y[2] * y[2] / (y[1] * y[1]),
                    ]
                },
                &|y| [y[0], y[1], y[1] / q, y[2]],
            )
        }
        Branch::P8ii => {
            // dD/dt = (A - B)^2 a3^2 / (AB) vanishes on A = B
            run3(
                [l[0], l[2], l[3]],
                &|y| [y[1] / y[0] + two, -y[1] * y[1] / (y[0] * y[0]), T::zero()],
                &|y| [y[0], y[0], y[1], y[2]],
            )
        }
        Branch::P9ii => {
            let Some((i, j, k)) = a10_pair(lambda) else {
                return Ok(None);
            };
            run3(
                [l[i], l[j], l[3]],
                &|y| [-y[0] * y[0] / (y[1] * y[1]), y[0] / y[1] - two, T::zero()],
                &|y| {
                    let mut g = [T::zero(); 4];
                    g[i] = y[0];
                    g[j] = y[1];
                    g[k] = y[1];
                    g[3] = y[2];
                    g
                },
            )
        }
        Branch::P9iii => run3(
            [l[0], l[3], T::one()],
            &|_y| [-T::one(), T::zero(), T::zero()],
            &|y| [y[0], y[0], y[0], y[1]],
        ),
        _ => Ok(None),
    }
}

/// Names of the pair table entries, e.g. `Ric(1,2)`.
pub fn pair_names() -> [String; 6] {
    PAIRS.map(|(i, j)| format!("Ric({},{})", i + 1, j + 1))
}
