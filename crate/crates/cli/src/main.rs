//! `riemnav` — solve, check and sweep trajectory scenarios.
//!
//! Exit status: 0 on success, 1 when the solver fails (a partial report is
//! still written), 2 when the input cannot be read, parsed or validated.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use riemnav::report::{trajectory_from_csv, trajectory_to_csv};
use riemnav::{solve_from, Error, RunReport, Scenario, WarmStart};

#[derive(Parser)]
#[command(name = "riemnav", version, about = "Variational obstacle-avoidance trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write the trajectory and report.
    Solve {
        scenario: PathBuf,
        /// Trajectory CSV output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Report JSON output (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Record the wall time in the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Recompute every residual of a stored trajectory.
    Check {
        scenario: PathBuf,
        trajectory: PathBuf,
        /// Report JSON output (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Solve a family of scenarios, warm-starting each from the previous.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        param: Param,
        /// Comma-separated parameter values, solved in the given order.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Sigma,
    Tau,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::Sigma => "sigma",
            Param::Tau => "tau",
        }
    }
}

/// An error together with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input_error(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn run_error(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(input_error)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display())).map_err(run_error)
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    Scenario::from_json(&read(path)?).with_context(|| format!("in {}", path.display())).map_err(input_error)
}

/// Solver errors are failures of the run; anything the scenario itself got
/// wrong is an input error.
fn classify(err: Error) -> Failure {
    match err {
        Error::Validation(_) | Error::Parse(_) | Error::DimensionMismatch { .. } => input_error(err),
        _ => run_error(err),
    }
}

fn emit_report(report: &RunReport, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, &report.to_json()),
        None => {
            print!("{}", report.to_json());
            Ok(())
        }
    }
}

/// Solves `scen`, writes the artefacts and returns the report.
fn solve_one(
    scen: &Scenario,
    warm: Option<&WarmStart>,
    csv: Option<&Path>,
    timing: bool,
) -> Result<(RunReport, Option<WarmStart>), Failure> {
    let start = Instant::now();
    let sol = solve_from(scen, warm).map_err(classify)?;
    let mut report = RunReport::from_solution(scen, &sol).map_err(classify)?;
    if timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    if let Some(path) = csv {
        write(path, &trajectory_to_csv(scen, &sol.trajectory).map_err(classify)?)?;
    }
    let warm = sol.converged.then(|| sol.warm_start());
    Ok((report, warm))
}

fn summary(report: &RunReport) -> String {
    let d = &report.diagnostics;
    format!("converged={} J={:.10e} boundary_residual={:.3e}", report.converged, d.functional, d.boundary_residual)
}

fn cmd_solve(scenario: &Path, output: Option<&Path>, report_path: Option<&Path>, timing: bool) -> Result<(), Failure> {
    let scen = load_scenario(scenario)?;
    let (report, _) = solve_one(&scen, None, output, timing)?;
    emit_report(&report, report_path)?;
    eprintln!("{}", summary(&report));
    if report.converged {
        Ok(())
    } else {
        Err(run_error(anyhow!(report.error.clone().unwrap_or_else(|| "solver did not converge".into()))))
    }
}

fn cmd_check(scenario: &Path, trajectory: &Path, report_path: Option<&Path>) -> Result<(), Failure> {
    let scen = load_scenario(scenario)?;
    let traj = trajectory_from_csv(&scen, &read(trajectory)?)
        .with_context(|| format!("in {}", trajectory.display()))
        .map_err(input_error)?;
    let report = RunReport::from_trajectory(&scen, &traj).map_err(classify)?;
    emit_report(&report, report_path)?;
    eprintln!("{}", summary(&report));
    if report.converged {
        Ok(())
    } else {
        Err(run_error(anyhow!(
            "boundary residual {:.3e} exceeds the tolerance {:.1e}",
            report.diagnostics.boundary_residual,
            scen.solver.newton_tol
        )))
    }
}

fn with_param(base: &Scenario, param: Param, value: f64) -> Result<Scenario, Failure> {
    let mut scen = base.clone();
    match param {
        Param::Sigma => scen.sigma = value,
        Param::Tau => {
            scen.navigation
                .as_mut()
                .ok_or_else(|| input_error(anyhow!("sweeping tau needs a navigation block")))?
                .tau = value;
        }
    }
    scen.validate().with_context(|| format!("{} = {value}", param.name())).map_err(input_error)?;
    Ok(scen)
}

fn cmd_sweep(scenario: &Path, param: Param, values: &[f64], out_dir: &Path) -> Result<(), Failure> {
    let base = load_scenario(scenario)?;
    let family = values.iter().map(|&v| with_param(&base, param, v).map(|s| (v, s))).collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display())).map_err(run_error)?;
    let mut warm: Option<WarmStart> = None;
    let mut failed = Vec::new();
    for (value, scen) in &family {
        let stem = format!("{}_{value}", param.name());
        let csv = out_dir.join(format!("{stem}.csv"));
        let (report, next) = solve_one(scen, warm.as_ref(), Some(&csv), false)?;
        write(&out_dir.join(format!("{stem}.json")), &report.to_json())?;
        eprintln!("{}={value}: {}", param.name(), summary(&report));
        if !report.converged {
            failed.push(*value);
        }
        // a failed entry leaves the previous warm start in place
        warm = next.or(warm);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(run_error(anyhow!("no convergence for {} = {failed:?}", param.name())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { scenario, output, report, timing } => {
            cmd_solve(scenario, output.as_deref(), report.as_deref(), *timing)
        }
        Command::Check { scenario, trajectory, report } => cmd_check(scenario, trajectory, report.as_deref()),
        Command::Sweep { scenario, param, values, out_dir } => cmd_sweep(scenario, *param, values, out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
