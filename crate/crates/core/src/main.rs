use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use mtsdp::instances::{builtin, load_instance, Start};
use mtsdp::pathfollow::{estimate_order_trace, run_with_reference, SolverConfig, Status};
use mtsdp::regularity::regularity_report;
use mtsdp::report::{write_csv, Summary};
use mtsdp::verify::{run_suite, SUITES};
use mtsdp::{Error, InstanceSpec, ScalingKind};

#[derive(Parser)]
#[command(
    name = "mtsdp",
    version,
    about = "Local primal-dual interior point solver for nonlinear SDPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the path-following method and emit a convergence table.
    Solve(SolveArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
    /// Print the regularity report of an instance, or re-verify a run summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Built-in instance name.
    #[arg(long, conflicts_with = "instance_file")]
    instance: Option<String>,
    /// Instance JSON file.
    #[arg(long)]
    instance_file: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self) -> mtsdp::Result<InstanceSpec> {
        match (&self.instance, &self.instance_file) {
            (_, Some(path)) => load_instance(path),
            (Some(name), None) => builtin(name),
            (None, None) => builtin("lsdp-small"),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "hkm")]
    scaling: ScalingKind,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    xi: f64,
    /// Defaults to 1/3 when admissible, otherwise the midpoint of its admissible interval.
    #[arg(long)]
    xi_prime: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    tau: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Start from the central-path point at this barrier value instead of the instance's start.
    #[arg(long)]
    start_mu: Option<f64>,
    /// Convergence table; written to stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Run summary.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Recorded in the summary; the solver itself draws no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named suites.
    #[arg(long)]
    only: Vec<String>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Summary written by `solve --json`; its final iterate is re-checked.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write the regularity report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::UnknownInstance(_) | Error::Parse { .. } | Error::DimensionMismatch(_) => {
            ExitCode::from(EXIT_CONFIG)
        }
        _ => ExitCode::from(EXIT_FAILED),
    }
}

fn write_text(path: &PathBuf, text: &str) -> mtsdp::Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_solve(a: &SolveArgs) -> ExitCode {
    let mut spec = match a.instance.load() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if let Some(mu) = a.start_mu {
        spec.start = Start::CentralPath(mu);
    }
    let cfg = SolverConfig {
        alpha: a.alpha,
        beta: a.beta,
        gamma: a.gamma,
        xi: a.xi,
        xi_prime: a
            .xi_prime
            .unwrap_or_else(|| SolverConfig::default_xi_prime(a.alpha, a.xi)),
        tau: a.tau,
        scaling: a.scaling,
        tol: a.tol,
        max_iters: a.max_iters,
        ..Default::default()
    };
    if let Err(e) = cfg.validate() {
        return fail(&e);
    }
    let w0 = match spec.start_point() {
        Ok(w) => w,
        Err(e) => return fail(&e),
    };
    let p = spec.problem();
    let out = match run_with_reference(p, &w0, &cfg, spec.known_solution.as_ref()) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let order = spec
        .known_solution
        .as_ref()
        .and_then(|ws| estimate_order_trace(&out.trace, ws).ok());
    let regularity = spec
        .known_solution
        .as_ref()
        .and_then(|ws| regularity_report(p, ws).ok());

    let mut csv = Vec::new();
    if let Err(e) = write_csv(&out.trace, &mut csv) {
        return fail(&e);
    }
    let written = match &a.csv {
        Some(path) => fs::write(path, &csv).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", String::from_utf8_lossy(&csv));
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(&e);
    }

    let summary = match Summary::new(&spec, &cfg, &out, order, regularity) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let text = match summary.to_json() {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    if let Some(path) = &a.json {
        if let Err(e) = write_text(path, &text) {
            return fail(&e);
        }
    }

    let mut status = out.status.clone();
    if status == Status::Converged {
        // The reported iterate must pass the stopping test after a JSON round trip.
        match Summary::from_json(&text).and_then(|s| s.reverify(&spec)) {
            Ok(r) if r <= cfg.tol => {}
            Ok(r) => status = Status::Failed(format!("reported iterate has residual {r:.3e} after deserialization")),
            Err(e) => status = Status::Failed(e.to_string()),
        }
    }
    eprintln!(
        "{}: {} iterations, residual {:.3e}, seed {}{}",
        status.label(),
        out.trace.records.len(),
        summary.final_residual,
        a.seed,
        order.map(|q| format!(", order {q:.4}")).unwrap_or_default()
    );
    match status {
        Status::Converged => ExitCode::SUCCESS,
        Status::MaxIters => {
            error!("iteration limit {} reached", cfg.max_iters);
            eprintln!("reason: iteration limit {} reached", cfg.max_iters);
            ExitCode::from(EXIT_FAILED)
        }
        Status::Failed(reason) => {
            eprintln!("reason: {reason}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> ExitCode {
    let names: Vec<&str> = if a.only.is_empty() {
        SUITES.to_vec()
    } else {
        a.only.iter().map(String::as_str).collect()
    };
    let mut all = true;
    for name in names {
        match run_suite(name, a.trials, a.seed) {
            Ok(r) => {
                println!("{}", r.line());
                all &= r.passed();
            }
            Err(e) => return fail(&e),
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn cmd_report(a: &ReportArgs) -> ExitCode {
    if let Some(path) = &a.summary {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(&Error::Io(format!("{}: {e}", path.display()))),
        };
        let summary = match Summary::from_json(&text) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let spec = if a.instance.instance.is_some() || a.instance.instance_file.is_some() {
            a.instance.load()
        } else {
            builtin(&summary.instance)
        };
        let spec = match spec {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        return match summary.reverify(&spec) {
            Ok(r) => {
                let ok = summary.status != "converged" || r <= summary.config.tol;
                println!(
                    "{}: status {}, recomputed residual {r:.3e} (tol {:.0e})",
                    if ok { "consistent" } else { "inconsistent" },
                    summary.status,
                    summary.config.tol
                );
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_FAILED)
                }
            }
            Err(e) => fail(&e),
        };
    }
    let spec = match a.instance.load() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let Some(ws) = spec.known_solution.as_ref() else {
        return fail(&Error::InsufficientData(format!(
            "instance `{}` has no known solution",
            spec.name
        )));
    };
    let report = match regularity_report(spec.problem(), ws) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &a.json {
        Some(path) => {
            if let Err(e) = write_text(path, &text) {
                return fail(&e);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MTSDP_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    }
}
