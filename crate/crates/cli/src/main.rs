//! `z6`: analysis of `z' = (p1 + i p2) z^2 zbar + (s1 + i s2) z^3 zbar^2 - zbar^5`.

mod analyze;
mod commands;
mod error;
mod example42;
mod output;
mod params;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::analyze::CycleRecord;
use crate::error::CliError;
use crate::output::{open_sink, write_json, write_records, RecordFormat};
use crate::params::{parse_pair, ParamArgs, ScanArgs, TolArgs};
use crate::sweep::{Figure, SweepArgs, SweepSpec};

#[derive(Parser)]
#[command(name = "z6", version, about = "Equilibria, Abel reduction and limit cycles of a quintic Z6-equivariant system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one parameter point
    Analyze {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        scan: ScanArgs,
        /// Skip the limit-cycle scan
        #[arg(long)]
        no_cycles: bool,
        #[arg(long)]
        json: bool,
    },
    /// Classify every node of a parameter grid
    Sweep {
        #[command(flatten)]
        args: SweepArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: RecordFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Thresholds sigma_a and sigma_b of p1
    Sigma {
        #[arg(long, allow_hyphen_values = true)]
        p2: f64,
        #[arg(long, allow_hyphen_values = true)]
        s1: f64,
        #[arg(long, allow_hyphen_values = true)]
        s2: f64,
        /// Also report where this p1 lies
        #[arg(long, allow_hyphen_values = true)]
        p1: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// All equilibria with their eigenvalues and type
    Equilibria {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = z6_core::equilibria::EPS_Q)]
        tol_q_zero: f64,
        /// Records instead of a table
        #[arg(long, value_enum)]
        format: Option<RecordFormat>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Locate limit cycles by scanning the return map, or refine one bracket
    LimitCycle {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        scan: ScanArgs,
        /// `lo,hi` on the section r = |z|^2, theta = 0
        #[arg(long, value_parser = parse_pair)]
        bracket: Option<(f64, f64)>,
        /// Write the cycle orbits to this file
        #[arg(long)]
        orbit: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        orbit_format: RecordFormat,
        #[arg(long)]
        json: bool,
    },
    /// Sign of the field across segments; without --segment, builds the no-contact polygonal
    Transversality {
        #[command(flatten)]
        params: ParamArgs,
        /// `x0,y0,x1,y1`; repeatable
        #[arg(long, value_parser = commands::parse_segment, allow_hyphen_values = true)]
        segment: Vec<[f64; 4]>,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce the worked example and compare with its printed values
    Example42 {
        #[arg(long, allow_hyphen_values = true, default_value_t = example42::S2)]
        s2: f64,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value_t = 150)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze { params, tol, scan, no_cycles, json } => {
            let params = params.resolve()?;
            let rec = analyze::analyze(&params, &tol, (!no_cycles).then_some(&scan))?;
            let mut out = open_sink(None)?;
            if json {
                write_json(&mut out, &rec)?;
            } else {
                analyze::print_text(&mut out, &rec)?;
            }
            out.flush()?;
        }
        Command::Sweep { args, tol, format, output } => {
            let mut out = open_sink(output.as_deref())?;
            if args.figure == Some(Figure::Intervals) {
                let spec = SweepSpec::from_args(&args)?;
                let [_, p2, s1, s2] = spec.fixed;
                write_records(&mut out, &sweep::intervals(p2, s1, s2)?, format)?;
            } else {
                let spec = SweepSpec::from_args(&args)?;
                log::info!("sweeping {} nodes", spec.len());
                let cycles = args.cycles.then_some(args.samples);
                let records = sweep::run_grid(&spec, &tol, cycles, args.jobs)?;
                write_records(&mut out, &records, format)?;
            }
            out.flush()?;
        }
        Command::Sigma { p2, s1, s2, p1, json } => {
            let rec = commands::sigma(p2, s1, s2, p1)?;
            let mut out = open_sink(None)?;
            if json {
                write_json(&mut out, &rec)?;
            } else {
                commands::print_sigma(&mut out, &rec)?;
            }
            out.flush()?;
        }
        Command::Equilibria { params, tol_q_zero, format, output } => {
            let rows = commands::equilibria(&params.resolve()?, tol_q_zero)?;
            let mut out = open_sink(output.as_deref())?;
            match format {
                Some(f) => write_records(&mut out, &rows, f)?,
                None => commands::print_equilibria(&mut out, &rows)?,
            }
            out.flush()?;
        }
        Command::LimitCycle { params, tol, scan, bracket, orbit, orbit_format, json } => {
            let params = params.resolve()?;
            let rho_max = match bracket {
                Some(_) => 0.0,
                None => scan.rho_max(&params)?,
            };
            let (cycles, degenerate) =
                commands::limit_cycles(&params, bracket, rho_max, scan.samples, &tol.cycle_options())?;
            if let Some(path) = orbit {
                let mut f = open_sink(Some(&path))?;
                write_records(&mut f, &commands::orbit_points(&cycles), orbit_format)?;
                f.flush()?;
            }
            let records: Vec<CycleRecord> = cycles.iter().map(CycleRecord::from).collect();
            let mut out = open_sink(None)?;
            if json {
                write_json(&mut out, &records)?;
            } else {
                commands::print_cycles(&mut out, &records, degenerate)?;
            }
            out.flush()?;
        }
        Command::Transversality { params, segment, json } => {
            let t = commands::transversality(&params.resolve()?, &segment)?;
            let mut out = open_sink(None)?;
            if json {
                write_json(&mut out, &t)?;
            } else {
                commands::print_transversality(&mut out, &t)?;
            }
            out.flush()?;
        }
        Command::Example42 { s2, tol, samples, json } => {
            let report = example42::run(s2, &tol.cycle_options(), samples)?;
            let mut out = open_sink(None)?;
            if json {
                write_json(&mut out, &report)?;
            } else {
                example42::print_text(&mut out, &report)?;
            }
            out.flush()?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("Z6_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            e.exit_code()
        }
    }
}
