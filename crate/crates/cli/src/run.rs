//! The `green`, `solve` and `verify` commands.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use greenbc::oracle::suite::{all_passed, format_table, run_suite, Mutation, Suite, TableFormat};
use greenbc::prelude::*;

use crate::config::{ConfigError, Problem, ProblemConfig};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io { path: PathBuf, source: io::Error },
    Numerical(Error),
}

impl CliError {
    /// 2 for every error; 1 is reserved for failed verification.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Numerical(e) => write!(f, "{}: {e}", error_kind(e)),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidDomain(_) => "InvalidDomain",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::SingularEvaluation(_) => "SingularEvaluation",
        Error::PointOnBoundary(_) => "PointOnBoundary",
        Error::PointOutsideDomain(_) => "PointOutsideDomain",
        Error::ShapeMismatch(_) => "ShapeMismatch",
        Error::InvalidCondition(_) => "InvalidCondition",
        Error::MissingAdjoint(_) => "MissingAdjoint",
        Error::Unsupported(_) => "Unsupported",
        Error::IllPosed { .. } => "IllPosed",
        Error::SingularMatrix { .. } => "SingularMatrix",
        Error::SingularBlock { .. } => "SingularBlock",
        Error::StageSingular { .. } => "StageSingular",
        Error::Inconsistent { .. } => "Inconsistent",
        Error::EigenvalueParameters(_) => "EigenvalueParameters",
        Error::SingularSystem(_) => "SingularSystem",
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn load_config(path: &Path) -> CliResult<ProblemConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(ProblemConfig::from_toml(&text)?)
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub method: Option<Method>,
    pub output: Option<PathBuf>,
    pub dump_g: Option<PathBuf>,
}

/// Summary printed to stderr after a successful run.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub method: Option<Method>,
    pub condition_estimate: Option<f64>,
    pub residuals: Vec<(String, f64)>,
    pub timings: Vec<(String, Duration)>,
    pub outputs: Vec<PathBuf>,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] run report", self.command)?;
        if let Some(m) = self.method {
            writeln!(f, "  method              {m}")?;
        }
        if let Some(c) = self.condition_estimate {
            writeln!(f, "  condition estimate  {c:.3e}")?;
        }
        for (name, r) in &self.residuals {
            writeln!(f, "  residual {name:<10} {r:.3e}")?;
        }
        for (name, t) in &self.timings {
            writeln!(f, "  time {name:<14} {:.3} ms", t.as_secs_f64() * 1e3)?;
        }
        for p in &self.outputs {
            writeln!(f, "  wrote {}", p.display())?;
        }
        Ok(())
    }
}

enum Built {
    Direct(GreenOperator),
    Recursive(RecursiveGreen),
}

impl Built {
    fn green(&self) -> &dyn GreenFunction {
        match self {
            Built::Direct(g) => g,
            Built::Recursive(g) => g,
        }
    }
}

fn construct(problem: &Problem, method: Method, report: &mut RunReport) -> CliResult<Built> {
    let t = Instant::now();
    let built = match method {
        Method::Direct => Built::Direct(GreenOperator::new(&problem.fs, &problem.bcs, &problem.bd)?),
        Method::Recursive => Built::Recursive(recursive_green(&problem.fs, &problem.bcs, &problem.bd)?),
    };
    report.timings.push(("construction".into(), t.elapsed()));
    report.method = Some(method);
    report.condition_estimate = Some(built.green().condition_estimate());
    Ok(built)
}

fn method_for(problem: &Problem, opts: &RunOptions) -> CliResult<Method> {
    let method = opts.method.unwrap_or(problem.method);
    if opts.dump_g.is_some() && method != Method::Direct {
        return Err(ConfigError::Field {
            field: "--dump-g".into(),
            message: "the boundary-response matrix exists only for method `direct`".into(),
        }
        .into());
    }
    Ok(method)
}

fn dump_g(built: &Built, opts: &RunOptions, report: &mut RunReport) -> CliResult<()> {
    if let (Built::Direct(g), Some(path)) = (built, &opts.dump_g) {
        write_file(path, &g.gmat().to_csv())?;
        report.outputs.push(path.clone());
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn coord_header(prefix: &str, dim: usize) -> Vec<String> {
    let names = if dim == 1 { &["x"][..] } else { &["x", "y"][..] };
    names.iter().map(|n| format!("{n}{prefix}")).collect()
}

fn csv_text(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Shortest round-trip form, switching to exponent notation for very small or large values.
fn num(v: f64) -> String {
    if v != 0.0 && !(1e-4..1e15).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn push_point(row: &mut Vec<String>, p: &Point) {
    row.extend(p.coords().iter().map(|c| num(*c)));
}

/// Output of a command: CSV text plus its destination.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: String,
    pub path: Option<PathBuf>,
    pub report: RunReport,
}

impl Outcome {
    /// Writes the CSV to its path, or to stdout when there is none.
    pub fn emit(mut self) -> CliResult<RunReport> {
        match &self.path {
            Some(p) => {
                write_file(p, &self.csv)?;
                self.report.outputs.push(p.clone());
            }
            None => print!("{}", self.csv),
        }
        Ok(self.report)
    }
}

/// Samples G(x, x′) for every source in `green.sources` and every x in `green.grid`.
pub fn cmd_green(cfg: &ProblemConfig, opts: &RunOptions) -> CliResult<Outcome> {
    let problem = cfg.build()?;
    let mut report = RunReport {
        command: "green".into(),
        ..RunReport::default()
    };
    let built = construct(&problem, method_for(&problem, opts)?, &mut report)?;
    dump_g(&built, opts, &mut report)?;
    let g = built.green();

    let t = Instant::now();
    let dim = problem.domain.dim();
    let mut header = coord_header("", dim);
    header.extend(coord_header("p", dim));
    header.extend(["re_G".to_string(), "im_G".to_string()]);
    let mut rows = Vec::new();
    let mut bc_residual: f64 = 0.0;
    for xp in &problem.green_sources {
        bc_residual = bc_residual.max(g.boundary_condition_residual(xp)?);
        for x in &problem.green_grid {
            let v = g.eval_g(x, xp)?;
            let mut row = Vec::with_capacity(2 * dim + 2);
            push_point(&mut row, x);
            push_point(&mut row, xp);
            row.extend([num(v.re), num(v.im)]);
            rows.push(row);
        }
    }
    report.timings.push(("sampling".into(), t.elapsed()));
    if !problem.green_sources.is_empty() {
        report.residuals.push(("boundary".into(), bc_residual));
    }
    Ok(Outcome {
        csv: csv_text(header, rows),
        path: opts.output.clone().or(problem.output_path.clone()),
        report,
    })
}

/// Solves the boundary value problem and samples u on `output.grid`.
pub fn cmd_solve(cfg: &ProblemConfig, opts: &RunOptions) -> CliResult<Outcome> {
    let problem = cfg.build()?;
    let mut report = RunReport {
        command: "solve".into(),
        ..RunReport::default()
    };
    let built = construct(&problem, method_for(&problem, opts)?, &mut report)?;
    dump_g(&built, opts, &mut report)?;

    let t = Instant::now();
    let vq = discretize_volume(&problem.domain, problem.volume_nodes)?;
    let sol = solve_bvp(built.green(), &vq, &problem.source, &problem.data)?;
    report.timings.push(("solve".into(), t.elapsed()));

    let t = Instant::now();
    let dim = problem.domain.dim();
    let mut header = coord_header("", dim);
    header.extend(["re_u".to_string(), "im_u".to_string()]);
    let mut rows = Vec::new();
    for x in &problem.output_grid {
        let v = sol.eval(x)?;
        let mut row = Vec::with_capacity(dim + 2);
        push_point(&mut row, x);
        row.extend([num(v.re), num(v.im)]);
        rows.push(row);
    }
    report.timings.push(("sampling".into(), t.elapsed()));

    let scale = if dim == 1 {
        problem.domain.measure()
    } else {
        problem.domain.measure().sqrt()
    };
    let rr = residual_report(&sol, &problem.data, &problem.output_grid, 1e-3 * scale)?;
    if rr.points_used > 0 {
        report.residuals.push(("pde".into(), rr.pde));
    }
    for (j, r) in rr.boundary.iter().enumerate() {
        report.residuals.push((format!("bc[{j}]"), *r));
    }
    if let Some(p) = &problem.residuals_path {
        let rows = report
            .residuals
            .iter()
            .map(|(n, v)| vec![n.clone(), num(*v)])
            .collect();
        write_file(p, &csv_text(vec!["name".into(), "value".into()], rows))?;
        report.outputs.push(p.clone());
    }
    Ok(Outcome {
        csv: csv_text(header, rows),
        path: opts.output.clone().or(problem.output_path.clone()),
        report,
    })
}

/// Runs a verification suite; the flag is true when every row passed.
pub fn cmd_verify(suite: Suite, format: TableFormat, mutation: Mutation) -> (String, bool) {
    let rows = run_suite(suite, mutation);
    (format_table(&rows, format), all_passed(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_display_names_the_kind() {
        let e = CliError::from(Error::IllPosed { condition: 3.5e17 });
        let msg = e.to_string();
        assert!(msg.starts_with("IllPosed") && msg.contains("3.500e17"), "{msg}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn csv_has_header_even_without_rows() {
        let text = csv_text(coord_header("p", 2), Vec::new());
        assert_eq!(text, "xp,yp\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, -0.072, 1.1102230246251565e-16, 3.0e20, 0.1 + 0.2] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(-5.551115123125783e-17), "-5.551115123125783e-17");
        assert_eq!(num(0.25), "0.25");
    }

    #[test]
    fn report_lists_everything() {
        let r = RunReport {
            command: "solve".into(),
            method: Some(Method::Recursive),
            condition_estimate: Some(12.5),
            residuals: vec![("pde".into(), 1e-9)],
            timings: vec![("solve".into(), Duration::from_millis(3))],
            outputs: vec![PathBuf::from("u.csv")],
        };
        let text = r.to_string();
        for needle in ["recursive", "1.250e1", "pde", "3.000 ms", "u.csv"] {
            assert!(text.contains(needle), "{needle} missing from {text}");
        }
    }
}
