//! Command-line front end: Monte Carlo sweeps, analytical curves,
//! throughput tables, and density validation, with CSV output.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 numerical
//! failure, 4 I/O error.

mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{apply_file, parse_list, parse_systems};
use dcsk_core::analysis::GammaParams;
use dcsk_core::sweep::{
    fmt_g10, parse_ber_curve, run_sweep, throughput_report, validate_pdf, SweepConfig, SweepResult,
    SystemId, CSV_HEADER,
};
use dcsk_core::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "dcsk",
    about = "Link-level simulator and analytical performance calculator for a \
             multi-user Walsh-coded DCSK system with decode-and-forward \
             cooperation over Nakagami-m multipath channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct ParamArgs {
    /// Flat `key = value` config file; flags below override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated systems: cc_sim, nc_sim, cc_analytical
    #[arg(long)]
    systems: Option<String>,
    /// Comma-separated Eb/N0 grid in dB
    #[arg(long)]
    grid: Option<String>,
    /// Number of users (power of two)
    #[arg(long)]
    n_users: Option<usize>,
    /// Chips per carrier sub-segment
    #[arg(long)]
    beta: Option<usize>,
    /// Nakagami fading factor (>= 0.5)
    #[arg(long)]
    m: Option<f64>,
    /// Number of multipath taps
    #[arg(long)]
    paths: Option<usize>,
    /// Comma-separated integer chip delays, starting at 0
    #[arg(long)]
    delays: Option<String>,
    /// Source-to-destination distance
    #[arg(long)]
    d_sd: Option<f64>,
    /// Source-to-relay distance
    #[arg(long)]
    d_sr: Option<f64>,
    /// Relay-to-destination distance
    #[arg(long)]
    d_rd: Option<f64>,
    /// Destination errors to accumulate per point before stopping
    #[arg(long)]
    min_errors: Option<u64>,
    /// Hard per-point bit budget
    #[arg(long)]
    max_bits: Option<u64>,
    /// Master seed of the deterministic random streams
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Diagnostic: run the simulators without noise
    #[arg(long)]
    noiseless: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run Monte Carlo sweeps (and analytical curves) and emit CSV
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the analytical BER curve only
    Analyze {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized throughput table from a sweep CSV
    Throughput {
        /// CSV produced by `simulate`
        #[arg(long)]
        input: PathBuf,
        /// Optional two-column (eb_n0_db, ber) CSV for the MIMO baseline
        #[arg(long)]
        mimo_ber: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        n_users: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the sum-of-gammas density against direct sampling
    ValidatePdf {
        #[arg(long)]
        shape2: f64,
        #[arg(long)]
        scale2: f64,
        #[arg(long)]
        shape3: f64,
        #[arg(long)]
        scale3: f64,
        /// Number of sampled sums (>= 1e5)
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Preset experiment configurations
    Reproduce {
        /// Which preset to run
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        params: ParamArgs,
        /// MIMO baseline BER file (fig4 only)
        #[arg(long)]
        mimo_ber: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Figure {
    /// BER of the cooperative system, the baseline, and the analytical curve
    Fig3,
    /// Normalized throughput of the three systems
    Fig4,
    /// Analytical BER across fading depths m = 1..4
    Fig5,
}

fn resolve_config(params: &ParamArgs) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::four_user_reference();
    if let Some(path) = &params.config {
        let text = std::fs::read_to_string(path)?;
        apply_file(&mut cfg, &text)?;
    }
    if let Some(systems) = &params.systems {
        cfg.systems = parse_systems(systems)?;
    }
    if let Some(grid) = &params.grid {
        cfg.grid_db = parse_list(grid, "grid value")?;
    }
    if let Some(n) = params.n_users {
        cfg.n_users = n;
    }
    if let Some(beta) = params.beta {
        cfg.beta = beta;
    }
    if let Some(m) = params.m {
        cfg.m = m;
    }
    if let Some(paths) = params.paths {
        cfg.paths = paths;
    }
    if let Some(delays) = &params.delays {
        cfg.delays = parse_list(delays, "delay")?;
    }
    if let Some(d) = params.d_sd {
        cfg.geometry.d_sd = d;
    }
    if let Some(d) = params.d_sr {
        cfg.geometry.d_sr = d;
    }
    if let Some(d) = params.d_rd {
        cfg.geometry.d_rd = d;
    }
    if let Some(e) = params.min_errors {
        cfg.min_errors = e;
    }
    if let Some(b) = params.max_bits {
        cfg.max_bits = b;
    }
    if let Some(s) = params.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = params.workers {
        cfg.workers = Some(w);
    }
    if params.noiseless {
        cfg.noiseless = true;
    }
    Ok(cfg)
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_and_write(cfg: &SweepConfig, out: Option<&Path>) -> Result<SweepResult> {
    let result = run_sweep(cfg)?;
    write_output(&result.to_csv(), out)?;
    Ok(result)
}

fn cmd_throughput(
    input: &Path,
    mimo_ber: Option<&Path>,
    n_users: usize,
    out: Option<&Path>,
) -> Result<()> {
    let curves = SweepResult::from_csv(&std::fs::read_to_string(input)?)?;
    let mimo = match mimo_ber {
        Some(path) => Some(parse_ber_curve(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let report = throughput_report(&curves, mimo.as_deref(), n_users)?;
    write_output(&report.to_csv(), out)
}

fn cmd_validate_pdf(
    shape2: f64,
    scale2: f64,
    shape3: f64,
    scale3: f64,
    samples: u64,
    seed: u64,
) -> Result<()> {
    let p2 = GammaParams::new(shape2, scale2)?;
    let p3 = GammaParams::new(shape3, scale3)?;
    let v = validate_pdf(p2, p3, samples, seed)?;
    println!(
        "samples={} bins={} range=[0, {}] residual_mass={} iae={} threshold=5e-3 => {}",
        v.samples,
        v.bins,
        fmt_g10(v.range_hi),
        fmt_g10(v.residual_mass),
        fmt_g10(v.iae),
        if v.pass { "PASS" } else { "FAIL" }
    );
    Ok(())
}

fn cmd_reproduce(
    figure: Figure,
    params: &ParamArgs,
    mimo_ber: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    match figure {
        Figure::Fig3 => {
            let mut cfg = resolve_config(params)?;
            if params.systems.is_none() {
                cfg.systems = vec![SystemId::CcSim, SystemId::NcSim, SystemId::CcAnalytical];
            }
            run_and_write(&cfg, out)?;
            Ok(())
        }
        Figure::Fig4 => {
            let mut cfg = resolve_config(params)?;
            if params.systems.is_none() {
                cfg.systems = vec![SystemId::CcSim, SystemId::NcSim];
            }
            let curves = run_sweep(&cfg)?;
            let mimo = match mimo_ber {
                Some(path) => Some(parse_ber_curve(&std::fs::read_to_string(path)?)?),
                None => None,
            };
            let report = throughput_report(&curves, mimo.as_deref(), cfg.n_users)?;
            write_output(&report.to_csv(), out)
        }
        Figure::Fig5 => {
            // Analytical curves across fading depths; one labelled system
            // per m so the rows stay within the standard CSV schema.
            let base = resolve_config(params)?;
            let mut csv = String::from(CSV_HEADER);
            csv.push('\n');
            for m in [1.0, 2.0, 3.0, 4.0] {
                let mut cfg = base.clone();
                cfg.m = m;
                cfg.systems = vec![SystemId::CcAnalytical];
                let result = run_sweep(&cfg)?;
                for p in &result.points {
                    csv.push_str(&format!(
                        "{},cc_analytical_m{},{},{},0,0,{},{}\n",
                        fmt_g10(p.eb_n0_db),
                        m as u32,
                        fmt_g10(p.ber),
                        fmt_g10(p.stderr),
                        fmt_g10(p.throughput),
                        fmt_g10(p.wall_ms),
                    ));
                }
            }
            write_output(&csv, out)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { params, out } => {
            let cfg = resolve_config(&params)?;
            run_and_write(&cfg, out.as_deref())?;
            Ok(())
        }
        Command::Analyze { params, out } => {
            let mut cfg = resolve_config(&params)?;
            cfg.systems = vec![SystemId::CcAnalytical];
            run_and_write(&cfg, out.as_deref())?;
            Ok(())
        }
        Command::Throughput {
            input,
            mimo_ber,
            n_users,
            out,
        } => cmd_throughput(&input, mimo_ber.as_deref(), n_users, out.as_deref()),
        Command::ValidatePdf {
            shape2,
            scale2,
            shape3,
            scale3,
            samples,
            seed,
        } => cmd_validate_pdf(shape2, scale2, shape3, scale3, samples, seed),
        Command::Reproduce {
            figure,
            params,
            mimo_ber,
            out,
        } => cmd_reproduce(figure, &params, mimo_ber.as_deref(), out.as_deref()),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Parse(_)
        | Error::IndexOutOfRange(_)
        | Error::DimensionMismatch(_) => 2,
        Error::Numerical(_)
        | Error::SeriesNotConverged { .. }
        | Error::DegenerateOrbit(_)
        | Error::NonFinite(_) => 3,
        Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
