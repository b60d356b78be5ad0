//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! worst cases underneath. Exits nonzero if any criterion fails for a reason
//! other than a documented floating-point limitation.

use std::process::ExitCode;

use ricci4::closed_forms::ImplicitFamily;
use ricci4::diagonalization::{frame_constants, offdiag_ricci, param_count};
use ricci4::flow::analysis::{asymptotic_profile, classify_singularity, SingularityType};
use ricci4::flow::product::ProductGeometry;
use ricci4::rng::DEFAULT_SEED;
use ricci4::tables::{ricci_fixtures, sectional_fixtures, Draw, Fixture, TableKind};
use ricci4::verify::{
    branch_cases, closed_form_cases, closed_form_error, envelope_cases, envelope_violation,
    fixture_check, implicit_report, monitor_cases, preservation_checks, Case, Check, MONOTONE_ULPS,
};
use ricci4::{
    integrate, rhs, Branch, DiagonalMetric, Family, FlowProblem, GeometryClass, GeometrySpec,
    IntegrateOptions,
};

const FIXTURE_TOL: f64 = 1e-10;
const FIXTURE_DRAWS: usize = 100;
const CLOSED_FORM_TOL: f64 = 1e-8;
const IMPLICIT_TOL: f64 = 1e-10;
const A8_LIMIT_TIME: f64 = 1e4;
const A8_LIMIT_TOL: f64 = 1e-4;
const MONITOR_TOL: f64 = 1e-8;
/// Rounding allowance on envelope bounds (relative).
const ENVELOPE_SLACK: f64 = 1e-12;
const DIAGONAL_TOL: f64 = 1e-9;
const EXPONENT_TOL: f64 = 0.05;
const DECAY_HORIZON: f64 = 1e4;
const T_EST_TOL: f64 = 1e-3;
const VOLUME_TOL: f64 = 1e-8;
const VOLUME_HORIZON: f64 = 100.0;
const FIXED_POINT_TOL: f64 = 1e-12;

/// A check that fails for a reason no double-precision run can avoid.
struct Known {
    name: &'static str,
    reason: &'static str,
}

struct Outcome {
    checks: Vec<Check>,
    notes: Vec<String>,
    known: Vec<Known>,
}

impl Outcome {
    fn new(checks: Vec<Check>) -> Self {
        Outcome {
            checks,
            notes: Vec::new(),
            known: Vec::new(),
        }
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn known_reason(&self, c: &Check) -> Option<&'static str> {
        self.known
            .iter()
            .find(|k| c.name.starts_with(k.name))
            .map(|k| k.reason)
    }

    /// Whether every failure is a documented limitation.
    fn acceptable(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.passed || self.known_reason(c).is_some())
    }
}

fn failed(name: &str, e: impl std::fmt::Display) -> Check {
    Check {
        name: name.to_string(),
        passed: false,
        measured: f64::NAN,
        tolerance: 0.0,
        detail: format!("error: {e}"),
    }
}

fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        measured: f64::NAN,
        tolerance: f64::NAN,
        detail: detail.into(),
    }
}

fn lie(name: &str, class: GeometryClass, family: Option<Family<f64>>, lambda: [f64; 4]) -> Case {
    Case::lie(name, GeometrySpec::new(class), family, lambda)
}

fn fixtures(list: Vec<Fixture>, seed: u64) -> Outcome {
    let mut out = Outcome::new(Vec::new());
    for (n, f) in list.iter().enumerate() {
        match fixture_check(f, seed + n as u64, FIXTURE_DRAWS) {
            Ok(mut c) => {
                c.tolerance = FIXTURE_TOL;
                c.passed = c.measured <= FIXTURE_TOL;
                if !c.detail.is_empty() {
                    out.notes.push(format!("{}: {}", f.id, c.detail));
                    c.detail.clear();
                }
                out.checks.push(c);
            }
            Err(e) => out.checks.push(failed(f.id, e)),
        }
    }
    out
}

fn criterion_1() -> Outcome {
    fixtures(ricci_fixtures(), DEFAULT_SEED)
}

fn criterion_2() -> Outcome {
    fixtures(sectional_fixtures(), DEFAULT_SEED + 1000)
}

fn criterion_3() -> Outcome {
    let mut checks = Vec::new();
    for class in GeometryClass::ALL {
        match closed_form_cases(class) {
            Ok(cases) => {
                for case in &cases {
                    checks.push(match closed_form_error(case) {
                        Ok(e) => {
                            Check::at_most(format!("closed form {}", case.name), e, CLOSED_FORM_TOL)
                        }
                        Err(e) => failed(&case.name, e),
                    });
                }
            }
            Err(e) => checks.push(failed(class.label(), e)),
        }
    }
    Outcome::new(checks)
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new(Vec::new());
    let runs = [
        (ImplicitFamily::A7i, [1.0, 2.0, 3.0, 4.0], 1e3),
        (ImplicitFamily::A7i, [2.0, 3.0, 1.0, 0.5], 1e3),
        (ImplicitFamily::A8, [1.0, 2.0, 3.0, 4.0], A8_LIMIT_TIME),
    ];
    for (family, lambda, t_end) in runs {
        let name = format!("{family:?} {lambda:?}");
        let r = match implicit_report(family, lambda, t_end) {
            Ok(r) => r,
            Err(e) => {
                out.checks.push(failed(&name, e));
                continue;
            }
        };
        let mut detail = format!("worst at t = {:.3e}", r.worst_time);
        if let Some((t, gap)) = r.first_violation {
            detail.push_str(&format!(
                ", first above tolerance at t = {t:.3e} (k4/2 - A = {gap:.1e})"
            ));
        }
        out.checks.push(
            Check::at_most(format!("residual {name}"), r.max_residual, IMPLICIT_TOL)
                .with_detail(detail),
        );
        out.checks.push(Check::at_most(
            format!("root agreement {name}"),
            r.max_forward_error,
            IMPLICIT_TOL,
        ));
        out.checks.push(
            Check::at_most(
                format!("monotone {name}"),
                r.max_decrease,
                MONOTONE_ULPS * f64::EPSILON,
            )
            .with_detail("largest relative decrease between samples"),
        );
        if let Some(gap) = r.limit_gap {
            out.checks.push(
                Check::at_most(format!("limit k4/2 {name}"), gap, A8_LIMIT_TOL)
                    .with_detail(format!("|A - k4/2| at t = {:.0e}", r.final_time)),
            );
        }
    }
    out.known.push(Known {
        name: "residual A8",
        reason: "the relation amplifies an error in A by x^2/(1-x^2) with x = 2A/k4, and 1-x^2 decays \
                 like exp(-16t/k4); past t ~ 2.5 A equals k4/2 to the last bit and atanh(2A/k4) is \
                 undefined. The root agreement line measures the same trajectory against the relation \
                 solved for A.",
    });
    out
}

fn criterion_5() -> Outcome {
    let mut checks = Vec::new();
    for class in GeometryClass::ALL {
        let cases = match monitor_cases(class) {
            Ok(c) => c,
            Err(e) => {
                checks.push(failed(class.label(), e));
                continue;
            }
        };
        for case in &cases {
            match case.run(1e3, &[]) {
                Ok(traj) => {
                    for m in &traj.monitors {
                        checks.push(Check::at_most(
                            format!("{} {}", m.monitor, case.name),
                            m.drift(),
                            MONITOR_TOL,
                        ));
                    }
                }
                Err(e) => checks.push(failed(&case.name, e)),
            }
        }
    }
    Outcome::new(checks)
}

fn criterion_6() -> Outcome {
    let mut checks = Vec::new();
    for class in [GeometryClass::A3, GeometryClass::A5, GeometryClass::A9] {
        match envelope_cases(class) {
            Ok(cases) => {
                for (family, case, param) in &cases {
                    checks.push(match envelope_violation(*family, case, *param) {
                        Ok(v) => {
                            Check::at_most(format!("envelope {}", case.name), v, ENVELOPE_SLACK)
                                .with_detail("largest relative excursion outside the bounds")
                        }
                        Err(e) => failed(&case.name, e),
                    });
                }
            }
            Err(e) => checks.push(failed(class.label(), e)),
        }
    }
    Outcome::new(checks)
}

/// Printed off-diagonal formulas against the pipeline at one input.
fn printed_offdiag(
    spec: &GeometrySpec<f64>,
    a: &[f64],
    lambda: [f64; 4],
) -> Result<(f64, f64), String> {
    let fixture = ricci_fixtures()
        .into_iter()
        .find(|f| {
            f.class == spec.class && f.kind == TableKind::OffDiagonal && f.id.contains("template")
        })
        .ok_or("no printed table")?;
    let mut params = a.to_vec();
    params.resize(param_count(spec.class), 0.0);
    let constants = frame_constants(spec, &params).map_err(|e| e.to_string())?;
    let draw = Draw {
        spec: spec.clone(),
        params: params.clone(),
        metric: lambda,
        constants,
    };
    let mut worst = 0.0_f64;
    for entry in fixture.printed(&draw) {
        let v = Fixture::pipeline(&draw, entry.quantity).map_err(|e| e.to_string())?;
        worst = worst.max((v - entry.expected()).abs());
    }
    let g = DiagonalMetric::from_array(lambda).map_err(|e| e.to_string())?;
    let size = offdiag_ricci(spec, &params, &g)
        .map_err(|e| e.to_string())?
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    Ok((worst, size))
}

fn criterion_7() -> Outcome {
    let mut checks = Vec::new();
    for case in branch_cases() {
        match preservation_checks(&case) {
            Ok(v) => {
                for mut c in v {
                    if c.name.starts_with("diagonal kept") {
                        c.tolerance = DIAGONAL_TOL;
                        c.passed &= c.measured <= DIAGONAL_TOL;
                    }
                    checks.push(c);
                }
            }
            Err(e) => checks.push(failed(&case.branch.to_string(), e)),
        }
        if let Some((a, l)) = &case.bad {
            checks.push(match printed_offdiag(&case.spec, a, *l) {
                Ok((err, size)) => Check::at_most(
                    format!("printed formula at violation {} a={a:?}", case.branch),
                    err,
                    FIXTURE_TOL,
                )
                .with_detail(format!("largest |Ric(i,j)| = {size:.3e}")),
                Err(e) => failed(&case.branch.to_string(), e),
            });
        }
    }
    Outcome::new(checks)
}

fn immortal_cases() -> Vec<Case> {
    use GeometryClass::*;
    let l = [1.0, 2.0, 3.0, 4.0];
    let mut v: Vec<Case> = [-0.5, 0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&k| {
            Case::lie(
                &format!("A2 k={k}"),
                GeometrySpec::new(A2).with_k(k),
                None,
                l,
            )
        })
        .collect();
    v.push(Case::lie(
        "A3 k=0.5",
        GeometrySpec::new(A3).with_k(0.5),
        None,
        l,
    ));
    v.push(Case::lie(
        "A3 k=0.5 lambda1=lambda2",
        GeometrySpec::new(A3).with_k(0.5),
        None,
        [1.5, 1.5, 2.0, 3.0],
    ));
    v.push(lie("A4", A4, None, l));
    v.push(lie("A5", A5, None, l));
    v.push(lie("A6", A6, None, l));
    v.push(lie("A7i", A7, None, l));
    v.push(lie(
        "A7ii alpha=0.5",
        A7,
        Some(Family::p6ii(0.5)),
        [1.0, 1.5, 2.0, 1.0],
    ));
    v.push(lie("A8", A8, None, l));
    v.push(lie("A9i", A9, None, l));
    v.push(lie(
        "A9ii a3=0.5",
        A9,
        Some(Family::new(Branch::P8ii, &[0.0, 0.0, 0.5]).unwrap()),
        [2.0, 2.0, 3.0, 1.0],
    ));
    v
}

fn exponent_check(name: String, measured: f64, expected: f64) -> Check {
    Check::at_most(name, (measured - expected).abs(), EXPONENT_TOL)
        .with_detail(format!("exponent {measured:.4}, expected {expected:.4}"))
}

fn criterion_8() -> Outcome {
    let mut checks = Vec::new();
    for case in immortal_cases() {
        let prof = match case
            .run(DECAY_HORIZON, &[])
            .and_then(|t| asymptotic_profile(&t))
        {
            Ok(p) => p,
            Err(e) => {
                checks.push(failed(&case.name, e));
                continue;
            }
        };
        match prof.curvature {
            Some(m) => checks.push(exponent_check(format!("curvature {}", case.name), m, -1.0)),
            None => checks.push(flag(
                format!("curvature {}", case.name),
                false,
                "curvature vanished",
            )),
        }
        let e = prof.exponents;
        if case.name == "A6" {
            for (i, x) in [1.0 / 3.0, 0.0, -1.0 / 3.0, 2.0 / 3.0]
                .into_iter()
                .enumerate()
            {
                checks.push(exponent_check(
                    format!("A6 component {}", ["A", "B", "C", "D"][i]),
                    e[i],
                    x,
                ));
            }
        }
        if case.name == "A7i" {
            checks.push(exponent_check("A7i B".into(), e[1], 1.0 / 3.0));
            checks.push(exponent_check("A7i C".into(), e[2], 1.0 / 3.0));
            checks.push(exponent_check("A7i 1/D".into(), -e[3], 1.0 / 3.0));
        }
    }
    Outcome::new(checks)
}

fn classify(
    case_name: &str,
    problem: Result<FlowProblem<f64>, ricci4::Error>,
    t_end: f64,
) -> Result<SingularityType<f64>, String> {
    let p = problem.map_err(|e| format!("{case_name}: {e}"))?;
    let traj = integrate(&p, &IntegrateOptions::for_horizon(t_end)).map_err(|e| e.to_string())?;
    classify_singularity(&traj).map_err(|e| e.to_string())
}

fn criterion_9() -> Outcome {
    use GeometryClass::*;
    let mut checks = Vec::new();
    let mut expect = |name: String,
                      got: Result<SingularityType<f64>, String>,
                      want: &str,
                      t_ref: Option<f64>| {
        let label = match &got {
            Ok(SingularityType::TypeI { .. }) => "TypeI",
            Ok(SingularityType::TypeIII) => "TypeIII",
            Ok(SingularityType::ImmortalFlat) => "ImmortalFlat",
            Ok(SingularityType::Inconclusive) => "Inconclusive",
            Err(_) => "error",
        };
        let mut c = flag(
            format!("{name} -> {want}"),
            label == want,
            format!("got {label}"),
        );
        if let (Ok(SingularityType::TypeI { t_est }), Some(t)) = (&got, t_ref) {
            c = Check::at_most(
                format!("{name} -> {want}, T_est"),
                (t_est - t).abs(),
                T_EST_TOL,
            )
            .with_detail(format!("T_est = {t_est:.12}, expected {t:.12}"));
            c.passed &= label == want;
        }
        if let Err(e) = got {
            c.detail = e;
        }
        checks.push(c);
    };
    for case in immortal_cases() {
        expect(
            case.name.clone(),
            classify(&case.name, case.problem(DECAY_HORIZON), DECAY_HORIZON),
            "TypeIII",
            None,
        );
    }
    let a1 = lie("A1", A1, None, [1.0, 2.0, 3.0, 4.0]);
    expect(
        a1.name.clone(),
        classify(&a1.name, a1.problem(DECAY_HORIZON), DECAY_HORIZON),
        "ImmortalFlat",
        None,
    );
    let finite = [
        (lie("A10i", A10, None, [1.0, 2.0, 3.0, 1.0]), None),
        (
            lie(
                "A10ii a1=0.4",
                A10,
                Some(Family::new(Branch::P9ii, &[0.4]).unwrap()),
                [1.0, 2.0, 2.0, 1.0],
            ),
            None,
        ),
        (
            lie(
                "A10iii",
                A10,
                Some(Family::new(Branch::P9iii, &[0.2, 0.5, 0.9]).unwrap()),
                [1.0; 4],
            ),
            Some(1.0),
        ),
    ];
    for (case, t) in finite {
        expect(
            case.name.clone(),
            classify(&case.name, case.problem(10.0), 10.0),
            "TypeI",
            t,
        );
    }
    for (class, radii, t) in [
        (B2, vec![1.0], None),
        (B4, vec![1.0, 1.5], None),
        (B5, vec![1.0, 1.5], None),
        (B7, vec![1.0], None),
        (B9, vec![1.0], Some(1.0 / 6.0)),
    ] {
        let spec = GeometrySpec::new(class).with_radii(&radii);
        let name = format!("{class} radii {radii:?}");
        expect(
            name.clone(),
            classify(&name, FlowProblem::product(spec, 10.0), 10.0),
            "TypeI",
            t,
        );
    }
    Outcome::new(checks)
}

fn criterion_10() -> Outcome {
    use GeometryClass::*;
    let mut checks = Vec::new();
    let l = [1.0, 2.0, 3.0, 4.0];
    let mut cases: Vec<Case> = vec![
        Case::lie("A2 k=1", GeometrySpec::new(A2).with_k(1.0), None, l),
        Case::lie("A3 k=0.5", GeometrySpec::new(A3).with_k(0.5), None, l),
        lie("A4", A4, None, l),
        lie("A5", A5, None, l),
        lie("A6", A6, None, l),
        lie("A7i", A7, None, l),
        lie("A8", A8, None, l),
        lie("A9i", A9, None, l),
        lie("A10i", A10, None, [1.0, 2.0, 3.0, 1.0]),
    ];
    for class in [B1, B3, B4, B6, B7, B9] {
        let radii: Vec<f64> = if matches!(class, B4 | B6) {
            vec![1.0, 1.5]
        } else {
            vec![1.3]
        };
        cases.push(Case::product(class, &radii).unwrap());
    }
    for case in &cases {
        let run = case.problem(VOLUME_HORIZON).and_then(|p| {
            integrate(
                &p.normalized(true),
                &IntegrateOptions::for_horizon(VOLUME_HORIZON),
            )
        });
        match run {
            Ok(traj) => {
                let vol = |g: &[f64; 4]| g.iter().product::<f64>().sqrt();
                let v0 = vol(&traj.samples[0].metric);
                let drift = traj
                    .samples
                    .iter()
                    .fold(0.0_f64, |m, s| m.max((vol(&s.metric) / v0 - 1.0).abs()));
                let last = traj.last().map(|s| s.t).unwrap_or(0.0);
                checks.push(
                    Check::at_most(format!("volume {}", case.name), drift, VOLUME_TOL).with_detail(
                        format!(
                            "normalized flow to t = {last:.3e} ({})",
                            traj.termination.label()
                        ),
                    ),
                );
            }
            Err(e) => checks.push(failed(&case.name, e)),
        }
    }
    for r in [1.0, 2.5] {
        let geom = ProductGeometry::new(B9).unwrap();
        let g = geom.initial_metric(&[r]).unwrap();
        match rhs::<f64, _>(&geom, &g, true) {
            Ok(v) => {
                let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                checks.push(Check::at_most(
                    format!("round S4 radius {r} normalized rhs"),
                    m,
                    FIXED_POINT_TOL,
                ));
            }
            Err(e) => checks.push(failed("round S4", e)),
        }
    }
    Outcome::new(checks)
}

const CRITERIA: [(&str, fn() -> Outcome); 10] = [
    ("Ricci fixtures", criterion_1),
    ("sectional fixtures", criterion_2),
    ("closed-form agreement", criterion_3),
    ("implicit solutions", criterion_4),
    ("conserved quantities", criterion_5),
    ("envelopes", criterion_6),
    ("diagonality", criterion_7),
    ("decay exponents", criterion_8),
    ("singularity typing", criterion_9),
    ("normalized flow", criterion_10),
];

fn main() -> ExitCode {
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA.iter().map(|(_, f)| s.spawn(*f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("criterion panicked"))
            .collect()
    });
    let mut ok = true;
    for (n, ((title, _), out)) in CRITERIA.iter().zip(&outcomes).enumerate() {
        let verdict = if out.passed() { "PASS" } else { "FAIL" };
        let worst = out
            .checks
            .iter()
            .filter(|c| c.measured.is_finite() && c.tolerance > 0.0)
            // checks that pass by exceeding a threshold carry no margin
            .filter(|c| !c.passed || c.measured <= c.tolerance)
            .map(|c| c.measured / c.tolerance)
            .fold(0.0, f64::max);
        println!(
            "criterion {:>2} {verdict}  {title} ({} checks, worst at {:.2} of tolerance)",
            n + 1,
            out.checks.len(),
            worst
        );
        for c in &out.checks {
            if !c.passed {
                println!("    {c}");
                if let Some(reason) = out.known_reason(c) {
                    println!("      known limitation: {reason}");
                }
            }
        }
        for note in &out.notes {
            println!("    note: {note}");
        }
        if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
            for c in out.checks.iter().filter(|c| c.passed) {
                println!("    {c}");
            }
        }
        ok &= out.acceptable();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
