//! Command-line entry point: `check`, `mesh`, `solve`, `js`, `analyze` and `oracle`.
//!
//! Exit codes: 0 success, 1 failed structural verdict, 2 solver
//! non-convergence, 3 input error, 4 internal error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{analyze, AnalysisError, AnalysisOptions, AnalysisReport, MinimalityConfig};
use crate::domain::{
    check_cmc, check_minimal, check_translating, ArcKind, CheckReport, DomainError, DomainSpec, Verdict,
    SIGN_CONVENTION,
};
use crate::mesh::{generate_mesh, read_jsmesh, write_jsmesh, MeshError, TriMesh};
use crate::oracles::{identity_csv, identity_table, OracleError};
use crate::solver::{
    continuation_solve, newton_solve, read_solution_csv, solution_csv, ContinuationResult, DirichletData,
    ProblemKind, Solution, SolutionMeta, SolverConfig, SolverError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAIL: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "jsgraph", version, about = "Jenkins-Serrin graphs over planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Validate a domain and run the structural check for --mode.
    Check,
    /// Generate a jsmesh file.
    Mesh,
    /// Single Dirichlet solve; blow-up arcs take the largest cap.
    Solve,
    /// Check, mesh, capped continuation and analysis.
    Js,
    /// Analyze a stored solution.
    Analyze,
    /// Print oracle values and divergence identities.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    Minimal,
    Cmc,
    #[value(alias = "translator")]
    Translating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// Domain JSON file.
    #[arg(long, global = true)]
    domain: Option<PathBuf>,
    /// Problem kind.
    #[arg(long, alias = "kind", global = true, value_enum, default_value = "minimal")]
    mode: Mode,
    /// Mean curvature for --mode cmc.
    #[arg(long = "H", global = true)]
    h0: Option<f64>,
    /// Translator speed.
    #[arg(long, global = true, default_value_t = 1.0)]
    c: f64,
    /// Target mesh size (finite-difference step for `oracle`).
    #[arg(long = "h", global = true)]
    mesh_size: Option<f64>,
    /// Refinement factor near blow-up arcs.
    #[arg(long, global = true, default_value_t = 1.0)]
    grading: f64,
    /// Comma-separated increasing caps.
    #[arg(long, global = true, value_delimiter = ',')]
    caps: Option<Vec<f64>>,
    /// Newton residual tolerance relative to the initial residual.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Root seed for randomized tests.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory; nothing is written elsewhere.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// jsmesh file for `analyze`.
    #[arg(long, global = true)]
    mesh: Option<PathBuf>,
    /// Solution CSV for `analyze`.
    #[arg(long, global = true)]
    solution: Option<PathBuf>,
    /// Minimality trials.
    #[arg(long, global = true, default_value_t = 50)]
    trials: usize,
    /// Run the continuation even when the structural check does not pass.
    #[arg(long, global = true)]
    override_check: bool,
}

/// Validated run parameters, echoed in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub domain: Option<String>,
    pub kind: ProblemKind,
    pub h: f64,
    pub grading: f64,
    pub caps: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub override_check: bool,
}

const DEFAULT_H: f64 = 0.1;
const DEFAULT_FD_STEP: f64 = 1e-4;

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    body: serde_json::Value,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            body: serde_json::json!({"error": "input", "message": message.to_string()}),
        }
    }

    fn internal(message: impl ToString) -> Self {
        Self {
            code: EXIT_INTERNAL,
            body: serde_json::json!({"error": "internal", "message": message.to_string()}),
        }
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::Json { line, column, ref message } => Self {
                code: EXIT_INPUT,
                body: serde_json::json!({"error": "input", "message": message, "line": line, "column": column}),
            },
            DomainError::HypothesisViolation(_) | DomainError::NonGeodesic { .. } | DomainError::NonConvex { .. } => {
                Self {
                    code: EXIT_CHECK_FAIL,
                    body: serde_json::json!({"verdict": "fail", "sign_convention": SIGN_CONVENTION, "certificate": {"kind": "hypothesis", "detail": e.to_string()}}),
                }
            }
            DomainError::Internal(_) => Self::internal(e),
            _ => Self::input(e),
        }
    }
}

impl From<MeshError> for Failure {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::Inconsistent(_) | MeshError::Triangulation(_) => Self::internal(e),
            _ => Self::input(e),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Domain(d) => d.into(),
            SolverError::Mesh(m) => m.into(),
            SolverError::CheckFailed(report) => Self {
                code: EXIT_CHECK_FAIL,
                body: serde_json::to_value(&*report).unwrap_or_default(),
            },
            SolverError::InvalidParameter(_) | SolverError::MissingData { .. } | SolverError::MeshMismatch => {
                Self::input(e)
            }
            SolverError::Metric(_) => Self::input(e),
            _ => Self {
                code: EXIT_NONCONVERGENCE,
                body: serde_json::json!({"error": "nonconvergence", "message": e.to_string()}),
            },
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Domain(d) => d.into(),
            _ => Self::input(e),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Self::input(e)
    }
}

/// Output of a successful command.
struct Outcome {
    code: i32,
    stdout: String,
    files: Vec<(&'static str, String)>,
}

/// Runs the CLI on `args` (program name first), printing to the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(args, &mut out, &mut err)
}

/// Runs the CLI with explicit output streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(&cli)))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(Failure::internal(msg))
        });
    match result {
        Ok(outcome) => {
            if let Some(dir) = &cli.flags.out {
                if let Err(e) = write_files(dir, &outcome.files) {
                    let _ = writeln!(stderr, "{}", Failure::input(e).body);
                    return EXIT_INPUT;
                }
            }
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(f) => {
            let text = serde_json::to_string_pretty(&f.body).unwrap_or_default();
            if f.code == EXIT_CHECK_FAIL {
                let _ = writeln!(stdout, "{text}");
            } else {
                let _ = writeln!(stderr, "{text}");
            }
            f.code
        }
    }
}

fn write_files(dir: &Path, files: &[(&'static str, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn kind_of(flags: &Flags) -> Result<ProblemKind, Failure> {
    let kind = match flags.mode {
        Mode::Minimal => ProblemKind::Minimal,
        Mode::Cmc => ProblemKind::Cmc {
            h0: flags.h0.ok_or_else(|| Failure::input("--mode cmc needs --H"))?,
        },
        Mode::Translating => ProblemKind::Translator { c: flags.c },
    };
    kind.validate().map_err(Failure::from)?;
    Ok(kind)
}

fn run_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let f = &cli.flags;
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Failure::input(format!("--{name} must be positive, got {v}")))
        }
    };
    let default = SolverConfig::default();
    let config = RunConfig {
        command: serde_json::to_value(cli.command)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        domain: f.domain.as_ref().map(|p| p.display().to_string()),
        kind: kind_of(f)?,
        h: positive("h", f.mesh_size.unwrap_or(DEFAULT_H))?,
        grading: positive("grading", f.grading)?,
        caps: f.caps.clone().unwrap_or(default.caps),
        tol: positive("tol", f.tol.unwrap_or(default.rel_tol))?,
        seed: f.seed,
        trials: f.trials,
        override_check: f.override_check,
    };
    if config.grading < 1.0 {
        return Err(Failure::input("--grading must be at least 1"));
    }
    Ok(config)
}

fn solver_config(rc: &RunConfig) -> Result<SolverConfig, Failure> {
    let c = SolverConfig {
        rel_tol: rc.tol,
        caps: rc.caps.clone(),
        override_check: rc.override_check,
        ..SolverConfig::default()
    };
    c.validate().map_err(Failure::from)?;
    Ok(c)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_domain(flags: &Flags) -> Result<DomainSpec, Failure> {
    let path = flags.domain.as_ref().ok_or_else(|| Failure::input("--domain is required"))?;
    Ok(DomainSpec::from_json_str(&read_text(path)?)?)
}

fn format(flags: &Flags, default: Format) -> Format {
    flags.format.unwrap_or(default)
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Check => cmd_check(cli),
        Command::Mesh => cmd_mesh(cli),
        Command::Solve => cmd_solve(cli),
        Command::Js => cmd_js(cli),
        Command::Analyze => cmd_analyze(cli),
        Command::Oracle => cmd_oracle(cli),
    }
}

fn structural_check(spec: &DomainSpec, kind: ProblemKind) -> Result<CheckReport, Failure> {
    Ok(match kind {
        ProblemKind::Minimal => check_minimal(spec)?,
        ProblemKind::Cmc { h0 } => check_cmc(spec, h0)?,
        ProblemKind::Translator { .. } => check_translating(spec)?,
    })
}

fn check_csv(r: &CheckReport) -> String {
    let mut s = String::from("polygon,alpha,beta,perimeter,area,margin_alpha,margin_beta,holds\n");
    for p in &r.polygons {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.id,
            p.alpha,
            p.beta,
            p.perimeter,
            p.area,
            p.margin_alpha,
            p.margin_beta.map_or(String::new(), |m| m.to_string()),
            p.holds
        );
    }
    let _ = writeln!(s, "verdict,{:?}", r.verdict);
    s
}

fn cmd_check(cli: &Cli) -> Result<Outcome, Failure> {
    let spec = load_domain(&cli.flags)?;
    let kind = kind_of(&cli.flags)?;
    let report = structural_check(&spec, kind)?;
    let json = report.to_json() + "\n";
    let stdout = match format(&cli.flags, Format::Json) {
        Format::Json => json.clone(),
        Format::Csv => check_csv(&report),
    };
    Ok(Outcome {
        code: if report.verdict == Verdict::Fail { EXIT_CHECK_FAIL } else { EXIT_OK },
        stdout,
        files: vec![("check.json", json)],
    })
}

#[derive(Serialize)]
struct MeshSummary {
    nodes: usize,
    triangles: usize,
    boundary_edges: usize,
    h: f64,
    min_angle_deg: f64,
}

impl MeshSummary {
    fn of(m: &TriMesh) -> Self {
        Self {
            nodes: m.vertices.len(),
            triangles: m.triangles.len(),
            boundary_edges: m.boundary_edges.len(),
            h: m.h,
            min_angle_deg: m.min_angle_deg(),
        }
    }
}

fn cmd_mesh(cli: &Cli) -> Result<Outcome, Failure> {
    let spec = load_domain(&cli.flags)?;
    let rc = run_config(cli)?;
    let mesh = generate_mesh(&spec, rc.h, rc.grading)?;
    let text = write_jsmesh(&mesh);
    let stdout = if cli.flags.out.is_some() {
        to_json(&MeshSummary::of(&mesh))
    } else {
        text.clone()
    };
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        files: vec![("mesh.jsmesh", text)],
    })
}

const MESH_FILE: &str = "mesh.jsmesh";

fn cmd_solve(cli: &Cli) -> Result<Outcome, Failure> {
    let spec = load_domain(&cli.flags)?;
    let rc = run_config(cli)?;
    let config = solver_config(&rc)?;
    let mesh = Arc::new(generate_mesh(&spec, rc.h, rc.grading)?);
    let blow_up = spec.arcs.iter().any(|a| a.kind != ArcKind::C);
    let cap = *rc.caps.last().expect("validated caps are nonempty");
    let mut data = DirichletData::capped(&spec, &mesh, cap)?;
    if !blow_up {
        data.cap = None;
    }
    let sol = newton_solve(mesh.clone(), &spec.metric, &data, rc.kind, &config)?;
    let meta = SolutionMeta::new(&sol, MESH_FILE);
    let csv = solution_csv(&sol);
    let stdout = match format(&cli.flags, Format::Json) {
        Format::Json => to_json(&meta),
        Format::Csv => csv.clone(),
    };
    Ok(Outcome {
        code: if sol.converged { EXIT_OK } else { EXIT_NONCONVERGENCE },
        stdout,
        files: vec![
            (MESH_FILE, write_jsmesh(&mesh)),
            ("solution.csv", csv),
            ("solution.json", to_json(&meta)),
        ],
    })
}

/// Full report of the `js` pipeline.
#[derive(Serialize)]
struct JsReport<'a> {
    sign_convention: &'static str,
    /// Slack for `u_{n_{k+1}} ≥ u_{n_k}` and for comparisons.
    monotone_slack: &'static str,
    config: &'a RunConfig,
    check: &'a CheckReport,
    mesh: MeshSummary,
    continuation: &'a ContinuationResult,
    analysis: Option<AnalysisReport>,
}

fn cap_table(r: &ContinuationResult) -> String {
    let mut s = String::from("cap,iterations,substeps,residual,slack,min_increment,monotone_violations,interior_change\n");
    for c in &r.caps {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            c.cap,
            c.iterations,
            c.substeps,
            c.residual,
            c.slack,
            opt(c.min_increment),
            c.monotone_violations,
            opt(c.interior_change)
        );
    }
    s
}

fn analysis_options(rc: &RunConfig) -> AnalysisOptions {
    AnalysisOptions {
        minimality: MinimalityConfig {
            trials: rc.trials,
            seed: rc.seed,
            ..MinimalityConfig::default()
        },
        ..AnalysisOptions::default()
    }
}

fn cmd_js(cli: &Cli) -> Result<Outcome, Failure> {
    let spec = load_domain(&cli.flags)?;
    let rc = run_config(cli)?;
    let config = solver_config(&rc)?;
    let check = structural_check(&spec, rc.kind)?;
    if check.verdict != Verdict::Pass && !rc.override_check {
        return Err(Failure {
            code: EXIT_CHECK_FAIL,
            body: serde_json::to_value(&check).unwrap_or_default(),
        });
    }
    let mesh = Arc::new(generate_mesh(&spec, rc.h, rc.grading)?);
    let summary = MeshSummary::of(&mesh);
    let (result, code) = match continuation_solve(&spec, mesh.clone(), rc.kind, &config) {
        Ok(r) => (r, EXIT_OK),
        Err(SolverError::ContinuationAborted { partial, .. }) => (*partial, EXIT_NONCONVERGENCE),
        Err(e) => return Err(e.into()),
    };
    let last: Option<&Solution> = result.solutions.last();
    let analysis = match last {
        Some(sol) if code == EXIT_OK => Some(analyze(Some(&spec), sol, &spec.metric, &analysis_options(&rc))?),
        _ => None,
    };
    let report = JsReport {
        sign_convention: SIGN_CONVENTION,
        monotone_slack: "1e-8*(1+cap)",
        config: &rc,
        check: &check,
        mesh: summary,
        continuation: &result,
        analysis,
    };
    let json = to_json(&report);
    let mut files = vec![("report.json", json.clone()), (MESH_FILE, write_jsmesh(&mesh))];
    if let Some(sol) = last {
        files.push(("solution.csv", solution_csv(sol)));
        files.push(("solution.json", to_json(&SolutionMeta::new(sol, MESH_FILE))));
    }
    let stdout = match format(&cli.flags, Format::Json) {
        Format::Json => json,
        Format::Csv => cap_table(&result),
    };
    Ok(Outcome { code, stdout, files })
}

#[derive(Serialize)]
struct AnalyzeReport {
    sign_convention: &'static str,
    kind: ProblemKind,
    #[serde(flatten)]
    analysis: AnalysisReport,
}

fn cmd_analyze(cli: &Cli) -> Result<Outcome, Failure> {
    let f = &cli.flags;
    let rc = run_config(cli)?;
    let mesh_path = f.mesh.as_ref().ok_or_else(|| Failure::input("--mesh is required"))?;
    let sol_path = f.solution.as_ref().ok_or_else(|| Failure::input("--solution is required"))?;
    let mesh = Arc::new(read_jsmesh(&read_text(mesh_path)?)?);
    let u = read_solution_csv(&read_text(sol_path)?, &mesh)?;
    // the metadata sidecar, when present, fixes kind and convergence
    let meta: Option<SolutionMeta> = match fs::read_to_string(sol_path.with_extension("json")) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| Failure::input(format!("solution metadata: {e}")))?),
        Err(_) => None,
    };
    let spec = match &f.domain {
        Some(_) => Some(load_domain(f)?),
        None => None,
    };
    let metric = spec.as_ref().map_or_else(crate::metric::ConformalMetric::euclidean, |s| s.metric.clone());
    let sol = Solution {
        mesh,
        u,
        kind: meta.as_ref().map_or(rc.kind, |m| m.kind),
        cap: meta.as_ref().and_then(|m| m.cap),
        residual: meta.as_ref().map_or(0.0, |m| m.residual),
        iterations: meta.as_ref().map_or(0, |m| m.iterations),
        converged: meta.as_ref().is_none_or(|m| m.converged),
    };
    let analysis = analyze(spec.as_ref(), &sol, &metric, &analysis_options(&rc))?;
    let report = AnalyzeReport {
        sign_convention: SIGN_CONVENTION,
        kind: sol.kind,
        analysis,
    };
    let json = to_json(&report);
    let stdout = match format(f, Format::Json) {
        Format::Json => json.clone(),
        Format::Csv => {
            let mut s = String::from("arc,expected,max_dev,verdict\n");
            for b in &report.analysis.boundary {
                let _ = writeln!(s, "{},{},{},{}", b.arc, b.expected, b.max_dev, b.verdict);
            }
            s
        }
    };
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        files: vec![("analysis.json", json)],
    })
}

fn cmd_oracle(cli: &Cli) -> Result<Outcome, Failure> {
    let step = cli.flags.mesh_size.unwrap_or(DEFAULT_FD_STEP);
    let rows = identity_table(step)?;
    let csv = identity_csv(&rows);
    let stdout = match format(&cli.flags, Format::Csv) {
        Format::Csv => csv.clone(),
        Format::Json => to_json(&rows),
    };
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        files: vec![("oracle.csv", csv)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let mut full = vec!["jsgraph"];
        full.extend_from_slice(args);
        let code = run_with(full, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn oracle_prints_csv() {
        let (code, out, _) = run_capture(&["oracle"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("field,x,y,value,fd_divergence,rhs,abs_error\n"));
        assert_eq!(out.lines().count(), 9);
    }

    #[test]
    fn unknown_flag_is_an_input_error() {
        let (code, _, err) = run_capture(&["check", "--bogus"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(!err.is_empty());
    }

    #[test]
    fn missing_domain_is_an_input_error() {
        let (code, _, err) = run_capture(&["check"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--domain"));
    }

    #[test]
    fn cmc_needs_h() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.json");
        fs::write(&p, crate::domain::presets::scherk_square(1.0).to_json_string()).unwrap();
        let (code, _, err) = run_capture(&["check", "--domain", p.to_str().unwrap(), "--mode", "cmc"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--H"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("oracle"));
    }
}
