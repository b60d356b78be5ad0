//! `ricci4`: run, check and compare Ricci flows of homogeneous 4-geometries.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ricci4::closed_forms::{
    envelope, exact_metric, implicit_metric, solution_form, EnvelopeFamily, ImplicitFamily,
    SolutionKind,
};
use ricci4::config::{OutputFormat, RunConfig};
use ricci4::diagonalization::log_times;
use ricci4::flow::analysis::{asymptotic_profile, classify_singularity, SingularityType};
use ricci4::lie_algebra::ParamKind;
use ricci4::verify::{verify_all, verify_class, ClassReport, Settings};
use ricci4::{integrate, io, Branch, FlowProblem, GeometryClass, Termination};

const EXIT_ERROR: u8 = 1;
const EXIT_BLOWUP: u8 = 2;
const EXIT_WRONG_FAMILY: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Default horizon of `decay`: the fit uses the last decade.
const DECAY_T_END: f64 = 1e4;

#[derive(Parser)]
#[command(
    name = "ricci4",
    version,
    about = "Ricci flow of left-invariant metrics on the compact 4-geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the geometry classes with their parameters and diagonal families.
    List {
        #[arg(long)]
        class: Option<GeometryClass>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Integrate a flow and write the trajectory as CSV or JSON.
    Flow {
        #[command(flatten)]
        run: RunArgs,
        /// Output file (stdout when absent). CSV files get a `.meta.json` sidecar.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<TrajectoryFormat>,
    },
    /// Run the property suites for one class or for all of them.
    Verify {
        /// A class label or `all`.
        target: Option<String>,
        #[arg(long)]
        class: Option<GeometryClass>,
        #[arg(long)]
        seed: Option<u64>,
        /// Random draws per formula table.
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Fit late-time power laws of the metric and the curvature.
    Decay {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Tabulate the numeric flow against its closed-form or implicit solution.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Number of log-spaced comparison times.
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrajectoryFormat {
    Csv,
    Json,
}

/// Problem and integrator settings shared by the flow commands. Flags
/// override the same keys in `--config`.
#[derive(Args, Default)]
struct RunArgs {
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    class: Option<String>,
    /// Diagonal family, e.g. `P6.ii` or `A10iii`.
    #[arg(long, visible_alias = "family")]
    branch: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// `m,n` for the A2 lattices.
    #[arg(long)]
    mn: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Frame parameters `a1,a2,...`.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Initial coefficients `l1,l2,l3,l4`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    radii: Option<String>,
    /// Volume-normalized flow.
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    t_end: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    abs_tol: Option<String>,
    #[arg(long)]
    max_step: Option<String>,
    /// Keep every n-th accepted step.
    #[arg(long)]
    stride: Option<String>,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => {
                RunConfig::load(p).with_context(|| format!("reading config {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        let mut flags = RunConfig::default();
        let pairs = [
            ("class", &self.class),
            ("branch", &self.branch),
            ("k", &self.k),
            ("mn", &self.mn),
            ("alpha", &self.alpha),
            ("a", &self.a),
            ("lambda", &self.lambda),
            ("radii", &self.radii),
            ("t_end", &self.t_end),
            ("rel_tol", &self.rel_tol),
            ("abs_tol", &self.abs_tol),
            ("max_step", &self.max_step),
            ("sample_stride", &self.stride),
        ];
        for (key, v) in pairs {
            if let Some(v) = v {
                flags.set(key, v)?;
            }
        }
        if self.normalized {
            flags.normalized = Some(true);
        }
        Ok(base.overlay(flags))
    }
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_USAGE,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            error,
        }
    }
}

impl From<ricci4::Error> for Failure {
    fn from(e: ricci4::Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            error: e.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            error: e.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::List { class, format } => cmd_list(class, format),
        Command::Flow {
            run,
            output,
            format,
        } => cmd_flow(&run, output, format),
        Command::Verify {
            target,
            class,
            seed,
            draws,
            format,
        } => cmd_verify(target, class, seed, draws, format),
        Command::Decay { run, format } => cmd_decay(&run, format),
        Command::Compare {
            run,
            points,
            format,
        } => cmd_compare(&run, points, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) if is_broken_pipe(&f.error) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// A closed stdout (`ricci4 list | head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = match c.downcast_ref::<ricci4::Error>() {
            Some(ricci4::Error::Io(io)) => Some(io),
            _ => c.downcast_ref::<std::io::Error>(),
        };
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn params_text(class: GeometryClass) -> String {
    match class.params() {
        ParamKind::None => "-".into(),
        ParamKind::KOrMn => "k >= -1/2, or m,n".into(),
        ParamKind::K => "k".into(),
        ParamKind::Radii(1) => "radius".into(),
        ParamKind::Radii(n) => format!("{n} radii"),
    }
}

fn catalog_entry(class: GeometryClass) -> Value {
    let (manifold, group, isotropy) = class.model();
    json!({
        "class": class.label(),
        "algebra": class.algebra(),
        "manifold": manifold,
        "group": group,
        "isotropy": isotropy,
        "parameters": params_text(class),
        "branches": class.branches().iter().map(|b| json!({"label": b.label(), "alias": b.alias()})).collect::<Vec<_>>(),
    })
}

fn cmd_list(class: Option<GeometryClass>, format: ReportFormat) -> CmdResult {
    let classes: Vec<GeometryClass> = match class {
        Some(c) => vec![c],
        None => GeometryClass::ALL.to_vec(),
    };
    let mut out = std::io::stdout().lock();
    if format == ReportFormat::Json {
        let v: Vec<Value> = classes.into_iter().map(catalog_entry).collect();
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&v).context("serializing catalog")?
        )?;
        return Ok(0);
    }
    let width = |f: fn(GeometryClass) -> String, head: &str| {
        classes
            .iter()
            .map(|&c| f(c).len())
            .chain([head.len()])
            .max()
            .unwrap_or(0)
    };
    let (wa, wm, wi) = (
        width(|c| c.algebra().to_string(), "algebra"),
        width(|c| c.model().0.to_string(), "manifold"),
        width(|c| c.model().2.to_string(), "isotropy"),
    );
    let wp = width(params_text, "parameters");
    writeln!(
        out,
        "{:<5} {:<wa$} {:<wm$} {:<wi$} {:<wp$} branches",
        "class", "algebra", "manifold", "isotropy", "parameters"
    )?;
    for c in classes {
        let (manifold, _, isotropy) = c.model();
        let branches: Vec<String> = c
            .branches()
            .iter()
            .map(|b| format!("{} ({})", b.label(), b.alias()))
            .collect();
        writeln!(
            out,
            "{:<5} {:<wa$} {:<wm$} {:<wi$} {:<wp$} {}",
            c.label(),
            c.algebra(),
            manifold,
            isotropy,
            params_text(c),
            if branches.is_empty() {
                "-".into()
            } else {
                branches.join(", ")
            }
        )?;
    }
    Ok(0)
}

fn problem(run: &RunArgs) -> Result<(RunConfig, FlowProblem<f64>), Failure> {
    let cfg = run.config().map_err(Failure::usage)?;
    let p = cfg.problem().map_err(Failure::usage)?;
    Ok((cfg, p))
}

fn config_value(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

fn cmd_flow(run: &RunArgs, output: Option<PathBuf>, format: Option<TrajectoryFormat>) -> CmdResult {
    let (mut cfg, p) = problem(run)?;
    if let Some(o) = &output {
        cfg.output = Some(o.display().to_string());
    }
    let format = match format {
        Some(TrajectoryFormat::Json) => OutputFormat::Json,
        Some(TrajectoryFormat::Csv) => OutputFormat::Csv,
        None => cfg.format.unwrap_or_default(),
    };
    cfg.format = Some(format);
    let traj = integrate(&p, &cfg.options())?;
    let meta = config_value(&cfg);
    match (cfg.output.as_deref(), format) {
        (Some(path), OutputFormat::Csv) => io::save_csv(&traj, &meta, path.as_ref())?,
        (Some(path), OutputFormat::Json) => io::save_json(&traj, &meta, path.as_ref())?,
        (None, OutputFormat::Csv) => io::write_csv(&traj, std::io::stdout().lock())?,
        (None, OutputFormat::Json) => {
            let v = io::to_json(&traj, &meta);
            writeln!(
                std::io::stdout().lock(),
                "{}",
                serde_json::to_string(&v).context("serializing trajectory")?
            )?;
        }
    }
    match traj.termination {
        Termination::ReachedEnd => Ok(0),
        Termination::Blowup { t_est } => {
            eprintln!("blowup detected: T_est = {t_est:?}");
            Ok(EXIT_BLOWUP)
        }
        Termination::StepUnderflow { t } => {
            eprintln!("step size underflow at t = {t:?}");
            Ok(EXIT_ERROR)
        }
    }
}

fn print_class(out: &mut impl Write, r: &ClassReport) -> std::io::Result<()> {
    let status = if r.passed() { "pass" } else { "FAIL" };
    writeln!(
        out,
        "{} {status} ({} checks, {} failed)",
        r.class,
        r.checks.len(),
        r.failures()
    )?;
    for c in &r.checks {
        writeln!(out, "  {c}")?;
    }
    Ok(())
}

fn cmd_verify(
    target: Option<String>,
    class: Option<GeometryClass>,
    seed: Option<u64>,
    draws: usize,
    format: ReportFormat,
) -> CmdResult {
    let settings = Settings {
        seed: seed.unwrap_or(Settings::default().seed),
        draws,
    };
    let class = match (target.as_deref(), class) {
        (Some(_), Some(_)) => {
            return Err(Failure::usage(anyhow::anyhow!(
                "give a class either positionally or with --class"
            )))
        }
        (Some(t), None) if t.eq_ignore_ascii_case("all") => None,
        (Some(t), None) => Some(t.parse::<GeometryClass>().map_err(Failure::usage)?),
        (None, c) => c,
    };
    let reports = match class {
        Some(c) => vec![verify_class(c, settings)],
        None => verify_all(settings),
    };
    let ok = reports.iter().all(ClassReport::passed);
    let mut out = std::io::stdout().lock();
    if format == ReportFormat::Json {
        let v = json!({ "seed": settings.seed, "draws": draws, "passed": ok, "classes": reports });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&v).context("serializing report")?
        )?;
    } else if reports.len() == 1 {
        print_class(&mut out, &reports[0])?;
    } else {
        writeln!(
            out,
            "{:<5} {:>6} {:>6}  status",
            "class", "checks", "failed"
        )?;
        for r in &reports {
            writeln!(
                out,
                "{:<5} {:>6} {:>6}  {}",
                r.class,
                r.checks.len(),
                r.failures(),
                if r.passed() { "pass" } else { "FAIL" }
            )?;
        }
        for r in reports.iter().filter(|r| !r.passed()) {
            writeln!(out)?;
            writeln!(out, "{} failures:", r.class)?;
            for c in r.checks.iter().filter(|c| !c.passed) {
                writeln!(out, "  {c}")?;
            }
        }
    }
    Ok(if ok { 0 } else { EXIT_ERROR })
}

fn cmd_decay(run: &RunArgs, format: ReportFormat) -> CmdResult {
    let (mut cfg, _) = problem(run)?;
    if cfg.t_end.is_none() {
        cfg.t_end = Some(DECAY_T_END);
    }
    let p = cfg.problem().map_err(Failure::usage)?;
    let traj = integrate(&p, &cfg.options())?;
    let kind = classify_singularity(&traj)?;
    let mut out = std::io::stdout().lock();
    if let Termination::Blowup { t_est } = traj.termination {
        let typed = matches!(kind, SingularityType::TypeI { .. });
        if format == ReportFormat::Json {
            let v = json!({ "immortal": false, "T_est": t_est, "singularity": if typed { "TypeI" } else { "Inconclusive" } });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&v).context("serializing report")?
            )?;
        } else {
            writeln!(out, "finite-time singularity at T_est = {t_est:.12}")?;
            writeln!(
                out,
                "type: {}",
                if typed {
                    "Type I ((T - t) K bounded)"
                } else {
                    "inconclusive"
                }
            )?;
        }
        eprintln!("decay exponents need an immortal flow");
        return Ok(EXIT_WRONG_FAMILY);
    }
    let prof = asymptotic_profile(&traj)?;
    let label = match kind {
        SingularityType::ImmortalFlat => "flat",
        SingularityType::TypeIII => "TypeIII",
        SingularityType::TypeI { .. } => "TypeI",
        SingularityType::Inconclusive => "inconclusive",
    };
    if format == ReportFormat::Json {
        let v = json!({
            "immortal": true,
            "singularity": label,
            "window": [prof.window.0, prof.window.1],
            "exponents": prof.exponents,
            "residuals": prof.residuals,
            "curvature_exponent": prof.curvature,
            "curvature_residual": prof.curvature_residual,
        });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&v).context("serializing report")?
        )?;
        return Ok(0);
    }
    writeln!(
        out,
        "fit window t in [{:.3e}, {:.3e}], behaviour: {label}",
        prof.window.0, prof.window.1
    )?;
    for (i, name) in ["A", "B", "C", "D"].iter().enumerate() {
        writeln!(
            out,
            "  {name} ~ t^{:+.4}  (rms residual {:.2e})",
            prof.exponents[i], prof.residuals[i]
        )?;
    }
    match (prof.curvature, prof.curvature_residual) {
        (Some(m), Some(r)) => writeln!(out, "  |Rm| ~ t^{m:+.4}  (rms residual {r:.2e})")?,
        _ => writeln!(out, "  |Rm| = 0: flat")?,
    }
    Ok(0)
}

/// Reference solution used by `compare`.
enum Reference {
    Exact,
    Implicit(ImplicitFamily),
    Envelope(EnvelopeFamily, f64),
}

fn reference(p: &FlowProblem<f64>) -> Result<Option<Reference>, Failure> {
    let form = solution_form(&p.spec, p.family.as_ref(), &p.initial)?;
    let branch = p.family.as_ref().map(|f| f.branch);
    Ok(match form.kind {
        SolutionKind::Exact => Some(Reference::Exact),
        SolutionKind::Implicit => Some(Reference::Implicit(if p.spec.class == GeometryClass::A8 {
            ImplicitFamily::A8
        } else {
            ImplicitFamily::A7i
        })),
        SolutionKind::Envelope => match p.spec.class {
            GeometryClass::A3 => Some(Reference::Envelope(
                EnvelopeFamily::A3Unequal,
                p.spec.k()?.unwrap_or(0.0),
            )),
            GeometryClass::A5 => Some(Reference::Envelope(EnvelopeFamily::A5, 0.0)),
            GeometryClass::A9 if branch == Some(Branch::P8ii) || branch.is_none() => {
                Some(Reference::Envelope(EnvelopeFamily::A9ii, 0.0))
            }
            _ => None,
        },
        SolutionKind::NumericOnly => None,
    })
}

fn cmd_compare(run: &RunArgs, points: usize, format: ReportFormat) -> CmdResult {
    let (cfg, p) = problem(run)?;
    let Some(reference) = reference(&p)? else {
        eprintln!(
            "{} with this family has no closed-form or implicit solution to compare against",
            p.spec.class
        );
        return Ok(EXIT_WRONG_FAMILY);
    };
    let form = solution_form(&p.spec, p.family.as_ref(), &p.initial)?;
    let horizon = if form.validity.1.is_finite() {
        cfg.t_end().min(0.99 * form.validity.1)
    } else {
        cfg.t_end()
    };
    let times = log_times(horizon, points.max(2));
    let mut opts = cfg.options();
    opts.checkpoints = times.clone();
    let mut p = p;
    p.t_end = horizon;
    let traj = integrate(&p, &opts)?;
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for &t in &times {
        let Some(s) = traj.samples.iter().find(|s| s.t == t) else {
            continue;
        };
        let row = match &reference {
            Reference::Exact | Reference::Implicit(_) => {
                let g = match &reference {
                    Reference::Implicit(f) => implicit_metric(*f, &p.spec, &p.initial, t)?,
                    _ => exact_metric(&p.spec, p.family.as_ref(), &p.initial, t)?,
                };
                let rel: Vec<f64> = (0..4)
                    .map(|i| (s.metric[i] - g.g[i]).abs() / g.g[i])
                    .collect();
                worst = rel.iter().copied().fold(worst, f64::max);
                json!({ "t": t, "numeric": s.metric, "reference": g.g, "rel_err": rel })
            }
            Reference::Envelope(f, k) => {
                let env = envelope(*f, &p.initial, t, *k)?;
                let inside: Vec<Option<bool>> = (0..4)
                    .map(|i| {
                        env[i].map(|(lo, hi)| {
                            s.metric[i] >= lo * (1.0 - 1e-12) && s.metric[i] <= hi * (1.0 + 1e-12)
                        })
                    })
                    .collect();
                json!({ "t": t, "numeric": s.metric, "bounds": env, "inside": inside })
            }
        };
        rows.push(row);
    }
    let kind = match reference {
        Reference::Exact => "exact",
        Reference::Implicit(_) => "implicit",
        Reference::Envelope(..) => "envelope",
    };
    let mut out = std::io::stdout().lock();
    if format == ReportFormat::Json {
        let v = json!({ "reference": kind, "rows": rows, "max_rel_err": if kind == "envelope" { Value::Null } else { json!(worst) } });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&v).context("serializing comparison")?
        )?;
        return Ok(0);
    }
    writeln!(out, "reference: {kind}")?;
    let num = |v: &Value, i: usize| v.get(i).and_then(Value::as_f64).unwrap_or(f64::NAN);
    for r in &rows {
        let t = r["t"].as_f64().unwrap_or(f64::NAN);
        write!(out, "t = {t:<12.5e}")?;
        for (i, name) in ["A", "B", "C", "D"].iter().enumerate() {
            let x = num(&r["numeric"], i);
            if kind == "envelope" {
                match r["bounds"].get(i).and_then(Value::as_array) {
                    Some(b) => write!(
                        out,
                        "  {name}={x:.6e} in [{:.6e}, {:.6e}]",
                        num(&Value::from(b.clone()), 0),
                        num(&Value::from(b.clone()), 1)
                    )?,
                    None => write!(out, "  {name}={x:.6e}")?,
                }
            } else {
                write!(out, "  {name}={x:.10e} (rel {:.1e})", num(&r["rel_err"], i))?;
            }
        }
        writeln!(out)?;
    }
    if kind != "envelope" {
        writeln!(out, "max relative error {worst:.3e}")?;
    }
    Ok(0)
}
