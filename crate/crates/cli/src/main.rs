use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vss_cli::{run, Command, RunConfig, RunReport};
use vss_core::ode::OdeParams;

/// Numerical lab for three-dimensional vacuum static spaces.
#[derive(Parser)]
#[command(name = "vss", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Static-potential, flatness and inequality predicates on a catalog space.
    Verify(SpaceArgs),
    /// Curvature identity suite on a catalog space.
    Identities(SpaceArgs),
    /// Integrate the radial ODE and export the trajectory.
    OdeTrace(TraceArgs),
    /// Turning points, period and solution type of the radial ODE.
    OdeClassify(OdeArgs),
    /// Build a Schwarzschild–de Sitter space and scan it over one period.
    SdsScan(OdeArgs),
    /// Every check over the catalog and three SdS parameter sets.
    Suite(Common),
    /// List the catalog with its expected invariants.
    Catalog(Common),
}

#[derive(Args)]
struct Common {
    /// Number of sample points.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Tolerance overriding every per-check default.
    #[arg(long, env = "VSS_TOL")]
    tol: Option<f64>,
    /// Offset into the sampling sequence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use finite-difference metric jets instead of exact ones.
    #[arg(long)]
    fd_jets: bool,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the trace here (ODE commands).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SpaceArgs {
    /// Catalog space name.
    #[arg(long)]
    space: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OdeArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Scalar curvature.
    #[arg(long = "R", allow_negative_numbers = true)]
    r: f64,
    #[arg(long, allow_negative_numbers = true)]
    c0: f64,
    /// Fiber curvature.
    #[arg(long, allow_negative_numbers = true)]
    k: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    ode: OdeArgs,
    /// Initial h (default: lower turning point, or 1).
    #[arg(long)]
    h0: Option<f64>,
    /// Initial h'.
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    /// Length of the integration interval.
    #[arg(long)]
    span: Option<f64>,
}

fn config(command: Command, common: Common) -> RunConfig {
    RunConfig {
        samples: common.samples,
        tol: common.tol,
        seed: common.seed,
        fd_jets: common.fd_jets,
        json: common.json,
        csv: common.csv,
        ..RunConfig::new(command)
    }
}

fn ode_config(command: Command, args: OdeArgs) -> RunConfig {
    let params = OdeParams {
        n: args.n,
        r: args.r,
        c0: args.c0,
        k: args.k,
    };
    RunConfig {
        params: Some(params),
        ..config(command, args.common)
    }
}

fn print_report(report: &RunReport, catalog: bool) -> io::Result<()> {
    let mut out = io::stdout().lock();
    if catalog {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report.summary).expect("summary serializes")
        )?;
        return Ok(());
    }
    for line in report.summary_lines() {
        writeln!(out, "{line}")?;
    }
    let t = &report.totals;
    writeln!(
        out,
        "{} passed, {} failed, {} skipped in {:.0} ms",
        t.passed, t.failed, t.skipped, report.timing.elapsed_ms
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Cmd::Verify(a) => RunConfig {
            space: Some(a.space),
            ..config(Command::Verify, a.common)
        },
        Cmd::Identities(a) => RunConfig {
            space: Some(a.space),
            ..config(Command::Identities, a.common)
        },
        Cmd::OdeTrace(a) => RunConfig {
            h0: a.h0,
            v0: a.v0,
            span: a.span,
            ..ode_config(Command::OdeTrace, a.ode)
        },
        Cmd::OdeClassify(a) => ode_config(Command::OdeClassify, a),
        Cmd::SdsScan(a) => ode_config(Command::SdsScan, a),
        Cmd::Suite(c) => config(Command::Suite, c),
        Cmd::Catalog(c) => config(Command::Catalog, c),
    };
    let catalog = cfg.command == Command::Catalog;
    match run(&cfg) {
        Ok(report) => {
            // a closed pipe (e.g. `| head`) is not an error of the run
            let _ = print_report(&report, catalog);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
