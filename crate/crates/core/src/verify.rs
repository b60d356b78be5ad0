//! Property suites: formula fixtures, conserved quantities, closed-form and
//! implicit agreement, envelopes and diagonality, per geometry class.

use std::fmt;

use serde::Serialize;

use crate::closed_forms::{
    envelope, exact_metric, implicit_a, implicit_residual, solution_form, DerivedConstants,
    EnvelopeFamily, ImplicitFamily, SolutionKind,
};
use crate::curvature::DiagonalMetric;
use crate::diagonalization::{log_times, param_count, verify_preservation, Branch};
use crate::error::Result;
use crate::flow::{integrate, Family, FlowProblem, FlowTrajectory, IntegrateOptions};
use crate::lie_algebra::{GeometryClass, GeometrySpec};
use crate::rng::{seeded, DEFAULT_SEED};
use crate::tables::{all_fixtures, Fixture};

pub const FIXTURE_TOL: f64 = 1e-10;
/// Ten times the default relative step tolerance.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const IMPLICIT_TOL: f64 = 1e-10;
pub const MONITOR_TOL: f64 = 1e-8;
pub const DIAGONAL_TOL: f64 = 1e-9;
/// Slack allowed on envelope bounds, relative to the bound.
pub const ENVELOPE_SLACK: f64 = 1e-12;
/// Horizon of the immortal-flow checks.
pub const HORIZON: f64 = 1e3;
/// Horizon of the diagonality checks.
pub const PRESERVATION_HORIZON: f64 = 100.0;
/// Finite-time flows are compared up to this fraction of the singular time.
pub const FINITE_FRACTION: f64 = 0.99;
pub const COMPARISON_TIMES: usize = 20;
/// Horizon and tolerance of the A8 approach to `k4/2`.
pub const A8_LIMIT_TIME: f64 = 1e4;
pub const A8_LIMIT_TOL: f64 = 1e-4;
/// Decreases of `A` up to this many ulps count as rounding, not as a turn.
pub const MONOTONE_ULPS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// A check that passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "pass" } else { "FAIL" };
        if self.tolerance.is_nan() {
            write!(f, "{tag}  {:<48}", self.name)?;
        } else {
            write!(
                f,
                "{tag}  {:<48} {:>10.3e} (tol {:.0e})",
                self.name, self.measured, self.tolerance
            )?;
        }
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: GeometryClass,
    pub checks: Vec<Check>,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub seed: u64,
    /// Random draws per formula fixture.
    pub draws: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: DEFAULT_SEED,
            draws: 100,
        }
    }
}

/// A named flow configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub name: String,
    pub spec: GeometrySpec<f64>,
    pub family: Option<Family<f64>>,
    pub lambda: [f64; 4],
}

impl Case {
    pub fn lie(
        name: &str,
        spec: GeometrySpec<f64>,
        family: Option<Family<f64>>,
        lambda: [f64; 4],
    ) -> Self {
        Case {
            name: name.to_string(),
            spec,
            family,
            lambda,
        }
    }

    pub fn product(class: GeometryClass, radii: &[f64]) -> Result<Self> {
        let spec = GeometrySpec::new(class).with_radii(radii);
        let lambda = FlowProblem::product(spec.clone(), 1.0)?.initial.g;
        Ok(Case {
            name: format!("{class} radii {radii:?}"),
            spec,
            family: None,
            lambda,
        })
    }

    pub fn metric(&self) -> Result<DiagonalMetric<f64>> {
        DiagonalMetric::from_array(self.lambda)
    }

    pub fn problem(&self, t_end: f64) -> Result<FlowProblem<f64>> {
        let mut p = FlowProblem::new(self.spec.clone(), self.metric()?, t_end)?;
        if let Some(f) = &self.family {
            p = p.with_family(f.clone());
        }
        Ok(p)
    }

    /// Integrates to `t_end` at default tolerances, landing on `times`.
    pub fn run(&self, t_end: f64, times: &[f64]) -> Result<FlowTrajectory<f64>> {
        let mut opts = IntegrateOptions::for_horizon(t_end);
        opts.checkpoints = times.to_vec();
        integrate(&self.problem(t_end)?, &opts)
    }

    /// The comparison horizon: [`HORIZON`], or a fraction of the singular time.
    pub fn horizon(&self) -> Result<f64> {
        let form = solution_form(&self.spec, self.family.as_ref(), &self.metric()?)?;
        Ok(if form.validity.1.is_finite() {
            FINITE_FRACTION * form.validity.1
        } else {
            HORIZON
        })
    }
}

fn sample_at(traj: &FlowTrajectory<f64>, t: f64) -> Option<&crate::flow::Sample<f64>> {
    traj.samples.iter().find(|s| s.t == t)
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

/// Every fixture of `class` on `draws` random inputs.
pub fn fixture_checks(class: GeometryClass, seed: u64, draws: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, f) in all_fixtures()
        .into_iter()
        .enumerate()
        .filter(|(_, f)| f.class == class)
    {
        out.push(fixture_check(&f, seed.wrapping_add(n as u64), draws)?);
    }
    Ok(out)
}

pub fn fixture_check(f: &Fixture, seed: u64, draws: usize) -> Result<Check> {
    let mut rng = seeded(seed);
    let r = f.check(&mut rng, draws)?;
    let detail = r
        .corrections
        .iter()
        .map(|(q, miss)| format!("{q}: printed form off by up to {miss:.2e}, corrected form used"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Check::at_most(format!("fixture {}", r.id), r.max_error, FIXTURE_TOL).with_detail(detail))
}

/// Largest relative deviation from the exact solution at the comparison times.
pub fn closed_form_error(case: &Case) -> Result<f64> {
    let t_max = case.horizon()?;
    let times = log_times(t_max, COMPARISON_TIMES);
    let traj = case.run(t_max, &times)?;
    let g0 = case.metric()?;
    let mut worst = 0.0_f64;
    for &t in &times {
        let s = sample_at(&traj, t).ok_or_else(|| crate::Error::Integration {
            t,
            reason: "missed a comparison time".into(),
        })?;
        let exact = exact_metric(&case.spec, case.family.as_ref(), &g0, t)?;
        for i in 0..4 {
            worst = worst.max(rel(s.metric[i], exact.g[i]));
        }
    }
    Ok(worst)
}

pub fn closed_form_check(case: &Case) -> Result<Check> {
    Ok(Check::at_most(
        format!("closed form {}", case.name),
        closed_form_error(case)?,
        CLOSED_FORM_TOL,
    ))
}

/// Drift of every monitor of the case over `[0, HORIZON]`.
pub fn monitor_checks(case: &Case) -> Result<Vec<Check>> {
    let traj = case.run(HORIZON, &[])?;
    Ok(traj
        .monitors
        .iter()
        .map(|m| {
            let kind = if m.is_relative() {
                "relative"
            } else {
                "absolute"
            };
            Check::at_most(
                format!("monitor {} {}", m.monitor, case.name),
                m.drift(),
                MONITOR_TOL,
            )
            .with_detail(format!("{kind} drift over [0, {HORIZON}]"))
        })
        .collect())
}

/// Agreement of an A7i or A8 trajectory with the implicit relation for `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImplicitReport {
    /// Largest relative residual of the relation at the numeric `A`.
    pub max_residual: f64,
    /// Time of that residual.
    pub worst_time: f64,
    /// Largest relative difference between numeric `A` and the root of the relation.
    pub max_forward_error: f64,
    /// Largest step-to-step decrease of `A`, relative to `A`.
    pub max_decrease: f64,
    pub monotone: bool,
    /// First sample whose residual exceeds [`IMPLICIT_TOL`], with `k4/2 - A` there (A8).
    pub first_violation: Option<(f64, f64)>,
    pub final_a: f64,
    pub final_time: f64,
    /// `|A - k4/2|` at the end (A8).
    pub limit_gap: Option<f64>,
}

pub fn implicit_report(
    family: ImplicitFamily,
    lambda: [f64; 4],
    t_end: f64,
) -> Result<ImplicitReport> {
    let class = match family {
        ImplicitFamily::A7i => GeometryClass::A7,
        ImplicitFamily::A8 => GeometryClass::A8,
    };
    let case = Case::lie("implicit", GeometrySpec::new(class), None, lambda);
    let traj = case.run(t_end, &[])?;
    let consts = DerivedConstants::compute(&case.spec, None, &case.metric()?)?;
    let mut rep = ImplicitReport {
        max_residual: 0.0,
        worst_time: 0.0,
        max_forward_error: 0.0,
        max_decrease: 0.0,
        monotone: true,
        first_violation: None,
        final_a: 0.0,
        final_time: 0.0,
        limit_gap: None,
    };
    let mut prev = f64::NEG_INFINITY;
    for s in &traj.samples {
        let a = s.metric[0];
        let r = implicit_residual(family, &consts, lambda[0], a, s.t)?;
        // a NaN residual (the relation is undefined at the numeric state) counts as a failure
        if !(r <= IMPLICIT_TOL) && rep.first_violation.is_none() {
            rep.first_violation = Some((s.t, consts.k4.map_or(f64::NAN, |k4| k4 / 2.0 - a)));
        }
        if !(r <= rep.max_residual) {
            rep.max_residual = if r.is_nan() { f64::INFINITY } else { r };
            rep.worst_time = s.t;
        }
        let root = implicit_a(family, &consts, lambda[0], s.t)?;
        rep.max_forward_error = rep.max_forward_error.max(rel(a, root));
        if a < prev {
            rep.max_decrease = rep.max_decrease.max((prev - a) / a);
        }
        prev = a;
    }
    // A is stored as exp(log A), so a converged A may wobble by an ulp or two
    rep.monotone = rep.max_decrease <= MONOTONE_ULPS * f64::EPSILON;
    let last = traj.last().expect("trajectory has samples");
    rep.final_a = last.metric[0];
    rep.final_time = last.t;
    rep.limit_gap = consts.k4.map(|k4| (rep.final_a - k4 / 2.0).abs());
    Ok(rep)
}

pub fn implicit_checks(family: ImplicitFamily, lambda: [f64; 4], t_end: f64) -> Result<Vec<Check>> {
    let r = implicit_report(family, lambda, t_end)?;
    let name = format!("{family:?} lambda {lambda:?}");
    let mut detail = format!("worst at t = {:.4e}", r.worst_time);
    if let Some((t, gap)) = r.first_violation {
        detail.push_str(&format!("; first above tolerance at t = {t:.4e}"));
        if gap.is_finite() {
            detail.push_str(&format!(" where k4/2 - A = {gap:.2e}"));
        }
    }
    let mut out = vec![
        Check::at_most(
            format!("implicit residual {name}"),
            r.max_residual,
            IMPLICIT_TOL,
        )
        .with_detail(detail),
        Check::at_most(
            format!("implicit forward error {name}"),
            r.max_forward_error,
            IMPLICIT_TOL,
        ),
        Check::at_most(
            format!("A monotone {name}"),
            r.max_decrease,
            MONOTONE_ULPS * f64::EPSILON,
        )
        .with_detail("largest relative decrease between samples"),
    ];
    if let Some(gap) = r.limit_gap {
        out.push(
            Check::at_most(format!("A8 limit k4/2 {name}"), gap, A8_LIMIT_TOL)
                .with_detail(format!("|A - k4/2| at t = {:.0e}", r.final_time)),
        );
    }
    Ok(out)
}

/// Largest relative violation of an envelope at the samples (0 when inside).
pub fn envelope_violation(family: EnvelopeFamily, case: &Case, param: f64) -> Result<f64> {
    let traj = case.run(HORIZON, &[])?;
    let g0 = case.metric()?;
    let mut worst = 0.0_f64;
    for s in &traj.samples {
        let env = envelope(family, &g0, s.t, param)?;
        for (i, b) in env.iter().enumerate() {
            if let Some((lo, hi)) = b {
                let x = s.metric[i];
                worst = worst.max((lo - x) / lo.abs()).max((x - hi) / hi.abs());
            }
        }
    }
    Ok(worst)
}

pub fn envelope_check(family: EnvelopeFamily, case: &Case, param: f64) -> Result<Check> {
    Ok(Check::at_most(
        format!("envelope {}", case.name),
        envelope_violation(family, case, param)?,
        ENVELOPE_SLACK,
    )
    .with_detail("largest relative excursion outside the bounds"))
}

/// Condition-satisfying and condition-violating inputs for one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchCase {
    pub spec: GeometrySpec<f64>,
    pub branch: Branch,
    pub good: (Vec<f64>, [f64; 4]),
    pub bad: Option<(Vec<f64>, [f64; 4])>,
}

pub fn branch_cases() -> Vec<BranchCase> {
    use Branch::*;
    use GeometryClass::*;
    let l = [1.0, 2.0, 3.0, 4.0];
    let a = |v: &[f64]| v.to_vec();
    let bc = |spec: GeometrySpec<f64>, branch, good, bad| BranchCase {
        spec,
        branch,
        good,
        bad,
    };
    vec![
        bc(
            GeometrySpec::new(A2).with_k(2.0),
            P1i,
            (a(&[0.0, 0.0, 0.0, 0.3, -0.2, 0.5]), l),
            Some((a(&[0.4, 0.0, 0.0]), l)),
        ),
        bc(
            GeometrySpec::new(A2).with_k(1.0),
            P1ii,
            (a(&[0.3, 0.0, 0.0, 0.1]), l),
            Some((a(&[0.3, 0.2, 0.0]), l)),
        ),
        bc(
            GeometrySpec::new(A3).with_k(0.5),
            P2,
            (a(&[0.0, 0.0, 0.0, 0.2, 0.4, -0.3]), l),
            Some((a(&[0.0, 0.3, 0.0]), l)),
        ),
        bc(
            GeometrySpec::new(A4),
            P3,
            (a(&[0.5, -0.3, 0.7, 0.2, 0.1, 0.4]), l),
            None,
        ),
        bc(
            GeometrySpec::new(A5),
            P4,
            (a(&[0.0, 0.6, 0.0, 0.2, 0.1, 0.3]), l),
            Some((a(&[0.0, 0.0, 0.4]), l)),
        ),
        bc(
            GeometrySpec::new(A6),
            P5,
            (a(&[0.3, 0.3, 0.5, 0.2]), l),
            Some((a(&[0.0, 0.1]), l)),
        ),
        bc(
            GeometrySpec::new(A7),
            P6i,
            (a(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.4]), l),
            Some((a(&[0.0, 0.0, 0.3]), l)),
        ),
        bc(
            GeometrySpec::new(A7),
            P6ii,
            (a(&[0.0, 0.5]), [1.0, 1.5, 2.0, 1.0]),
            Some((a(&[0.0, 0.5]), l)),
        ),
        bc(
            GeometrySpec::new(A8),
            P7,
            (a(&[0.4, 0.0, 0.3, 0.3, 0.4, 0.2]), l),
            Some((a(&[0.0, 0.2]), l)),
        ),
        bc(
            GeometrySpec::new(A9),
            P8i,
            (a(&[]), l),
            Some((a(&[0.0, 0.0, 0.5]), l)),
        ),
        bc(
            GeometrySpec::new(A9),
            P8ii,
            (a(&[0.0, 0.0, 0.5]), [2.0, 2.0, 3.0, 1.0]),
            Some((a(&[0.3, 0.0, 0.5]), [2.0, 2.0, 3.0, 1.0])),
        ),
        bc(
            GeometrySpec::new(A10),
            P9i,
            (a(&[]), l),
            Some((a(&[0.2]), l)),
        ),
        bc(
            GeometrySpec::new(A10),
            P9ii,
            (a(&[0.4]), [1.0, 2.0, 2.0, 1.0]),
            Some((a(&[0.4, 0.3]), [1.0, 2.0, 2.0, 1.0])),
        ),
        bc(
            GeometrySpec::new(A10),
            P9iii,
            (a(&[0.2, 0.5, 0.9]), [1.0, 1.0, 1.0, 1.0]),
            Some((a(&[0.2, 0.5, 0.9]), [1.0, 1.0, 1.5, 1.0])),
        ),
    ]
}

/// Diagonality along the flow for the condition-satisfying input, and a
/// nonzero `t = 0` off-diagonal Ricci for the violating one.
pub fn preservation_checks(case: &BranchCase) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (a, l) = &case.good;
    let g = DiagonalMetric::from_array(*l)?;
    let r = verify_preservation(
        &case.spec,
        Some(case.branch),
        a,
        &g,
        PRESERVATION_HORIZON,
        None,
    )?;
    let term = r.termination.map(|t| t.label()).unwrap_or("not run");
    let mut detail = format!(
        "flow to t = {:.4} ({term}), relative {:.2e}",
        r.final_time, r.max_offdiag_relative
    );
    if let Some(d) = r.constraint_drift {
        detail.push_str(&format!(", constraint drift {d:.2e}"));
    }
    if let Some(m) = r.reduced_mismatch {
        detail.push_str(&format!(", reduced system mismatch {m:.2e}"));
    }
    let mut c = Check::at_most(
        format!("diagonal kept {} a={a:?}", case.branch),
        r.max_offdiag,
        DIAGONAL_TOL,
    )
    .with_detail(detail);
    c.passed &= r.attempted && r.verdict.diagonal_preserved;
    out.push(c);
    if let Some((a, l)) = &case.bad {
        let g = DiagonalMetric::from_array(*l)?;
        let r = verify_preservation(
            &case.spec,
            Some(case.branch),
            a,
            &g,
            PRESERVATION_HORIZON,
            None,
        )?;
        let size = r
            .initial_offdiag
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        out.push(Check {
            name: format!("violation detected {} a={a:?} lambda={l:?}", case.branch),
            passed: !r.verdict.diagonal_preserved && !r.attempted && size > DIAGONAL_TOL,
            measured: size,
            tolerance: DIAGONAL_TOL,
            detail: "initial off-diagonal Ricci must exceed the tolerance".into(),
        });
    }
    Ok(out)
}

/// Reference configurations with closed forms, per class.
pub fn closed_form_cases(class: GeometryClass) -> Result<Vec<Case>> {
    use GeometryClass::*;
    let l = [1.0, 2.0, 3.0, 4.0];
    let spec = GeometrySpec::new(class);
    Ok(match class {
        A1 => vec![Case::lie("A1", spec, None, l)],
        A2 => [-0.5, 0.0, 0.5, 1.0, 2.0]
            .iter()
            .map(|&k| {
                Case::lie(
                    &format!("A2 k={k}"),
                    GeometrySpec::new(A2).with_k(k),
                    None,
                    l,
                )
            })
            .collect(),
        A3 => vec![Case::lie(
            "A3 k=0.5 lambda1=lambda2",
            spec.with_k(0.5),
            None,
            [1.5, 1.5, 2.0, 3.0],
        )],
        A4 => vec![Case::lie("A4", spec, None, l)],
        A6 => vec![Case::lie("A6", spec, None, l)],
        A7 => vec![Case::lie(
            "A7ii alpha=0.5",
            spec,
            Some(Family::p6ii(0.5)),
            [1.0, 1.5, 2.0, 1.0],
        )],
        A10 => vec![Case::lie(
            "A10iii a=(0.2,0.5,0.9)",
            spec,
            Some(Family::new(Branch::P9iii, &[0.2, 0.5, 0.9])?),
            [1.0, 1.0, 1.0, 1.0],
        )],
        B1 | B2 | B3 | B7 | B8 | B9 | B10 => {
            vec![Case::product(class, &[1.0])?, Case::product(class, &[1.7])?]
        }
        B4 | B5 | B6 => vec![Case::product(class, &[1.0, 1.5])?],
        _ => Vec::new(),
    })
}

/// Reference configurations whose monitor sets are nonempty.
pub fn monitor_cases(class: GeometryClass) -> Result<Vec<Case>> {
    use GeometryClass::*;
    let l = [1.0, 2.0, 3.0, 4.0];
    let spec = GeometrySpec::new(class);
    Ok(match class {
        A1 => vec![Case::lie("A1", spec, None, l)],
        A2 => vec![Case::lie("A2 k=2", spec.with_k(2.0), None, l)],
        A3 => vec![Case::lie("A3 k=0.5", spec.with_k(0.5), None, l)],
        A4 | A5 | A6 | A8 => vec![Case::lie(class.label(), spec, None, l)],
        A7 => vec![
            Case::lie("A7i", spec.clone(), None, l),
            Case::lie(
                "A7ii alpha=0.5",
                spec,
                Some(Family::p6ii(0.5)),
                [1.0, 1.5, 2.0, 1.0],
            ),
        ],
        _ => Vec::new(),
    })
}

/// Envelope configurations: `(family, case, k or a3)`.
pub fn envelope_cases(class: GeometryClass) -> Result<Vec<(EnvelopeFamily, Case, f64)>> {
    use GeometryClass::*;
    Ok(match class {
        A3 => vec![
            (
                EnvelopeFamily::A3Unequal,
                Case::lie(
                    "A3 k=0.5 lambda1<lambda2",
                    GeometrySpec::new(A3).with_k(0.5),
                    None,
                    [1.0, 2.0, 3.0, 4.0],
                ),
                0.5,
            ),
            (
                EnvelopeFamily::A3Unequal,
                Case::lie(
                    "A3 k=0 lambda1>lambda2",
                    GeometrySpec::new(A3).with_k(0.0),
                    None,
                    [3.0, 1.0, 2.0, 1.0],
                ),
                0.0,
            ),
        ],
        A5 => vec![
            (
                EnvelopeFamily::A5,
                Case::lie(
                    "A5 (1,2,3,4)",
                    GeometrySpec::new(A5),
                    None,
                    [1.0, 2.0, 3.0, 4.0],
                ),
                0.0,
            ),
            (
                EnvelopeFamily::A5,
                Case::lie(
                    "A5 (3,1,2,0.5)",
                    GeometrySpec::new(A5),
                    None,
                    [3.0, 1.0, 2.0, 0.5],
                ),
                0.0,
            ),
        ],
        A9 => vec![(
            EnvelopeFamily::A9ii,
            Case::lie(
                "A9ii a3=0.5",
                GeometrySpec::new(A9),
                Some(Family::new(Branch::P8ii, &[0.0, 0.0, 0.5])?),
                [2.0, 2.0, 3.0, 1.0],
            ),
            0.5,
        )],
        _ => Vec::new(),
    })
}

fn push_result(out: &mut Vec<Check>, name: &str, r: Result<Vec<Check>>) {
    match r {
        Ok(v) => out.extend(v),
        Err(e) => out.push(Check {
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            tolerance: 0.0,
            detail: format!("error: {e}"),
        }),
    }
}

/// Runs every suite that applies to `class`.
pub fn verify_class(class: GeometryClass, settings: Settings) -> ClassReport {
    let mut checks = Vec::new();
    let seed = settings.seed.wrapping_add(class as u64 * 1000);
    push_result(
        &mut checks,
        "fixtures",
        fixture_checks(class, seed, settings.draws),
    );
    push_result(
        &mut checks,
        "closed forms",
        closed_form_cases(class).and_then(|cs| cs.iter().map(closed_form_check).collect()),
    );
    push_result(
        &mut checks,
        "monitors",
        monitor_cases(class).and_then(|cs| {
            let mut v = Vec::new();
            for c in &cs {
                v.extend(monitor_checks(c)?);
            }
            Ok(v)
        }),
    );
    push_result(
        &mut checks,
        "envelopes",
        envelope_cases(class).and_then(|cs| {
            cs.iter()
                .map(|(f, c, p)| envelope_check(*f, c, *p))
                .collect()
        }),
    );
    let implicit = match class {
        GeometryClass::A7 => Some((ImplicitFamily::A7i, HORIZON)),
        GeometryClass::A8 => Some((ImplicitFamily::A8, A8_LIMIT_TIME)),
        _ => None,
    };
    if let Some((f, t_end)) = implicit {
        push_result(
            &mut checks,
            "implicit",
            implicit_checks(f, [1.0, 2.0, 3.0, 4.0], t_end),
        );
    }
    if param_count(class) > 0 {
        for case in branch_cases().iter().filter(|c| c.spec.class == class) {
            push_result(&mut checks, "diagonality", preservation_checks(case));
        }
    }
    ClassReport { class, checks }
}

/// [`verify_class`] over all twenty classes, one worker thread per class.
pub fn verify_all(settings: Settings) -> Vec<ClassReport> {
    std::thread::scope(|s| {
        let handles: Vec<_> = GeometryClass::ALL
            .iter()
            .map(|&c| s.spawn(move || verify_class(c, settings)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    })
}

/// Whether `kind` is an exact closed form for the case (used by `compare`).
pub fn has_exact_form(case: &Case) -> Result<bool> {
    Ok(
        solution_form(&case.spec, case.family.as_ref(), &case.metric()?)?.kind
            == SolutionKind::Exact,
    )
}
