//! Batch command-line driver: load a domain and data, run solves, metric
//! grids, operator exports, closed-form references, or the seeded
//! verification suite, and emit machine-readable artifacts.
//!
//! Exit codes: 0 on success, 1 on validation problems, 2 on numerical
//! failures (including failed verification checks). Errors print a JSON
//! object on stderr. Thread count follows RAYON_NUM_THREADS.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use ising_hardy::error::{Error, Result};
use ising_hardy::geometry::CircleDomain;
use ising_hardy::metric::{self, SpinStructure};
use ising_hardy::solver::{build_solver, default_cutoff};
use ising_hardy::{io, verify};

#[derive(Parser)]
#[command(
    name = "ising-hardy",
    version,
    about = "Hardy-space solver for Ising-type spinor boundary conditions on circle domains"
)]
struct Cli {
    /// Only log errors (sets the default log filter to "error").
    #[arg(long, global = true)]
    quiet: bool,

    /// Emit reports as JSON instead of human-readable tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary value problem Im((F - f) nu^{1/2}) = 0.
    Solve {
        /// Domain JSON: {"outer": {"center": [re, im], "radius": r}, "holes": [...]}.
        #[arg(long)]
        domain: PathBuf,
        /// Boundary data JSON: one {"modes": ...} or {"samples": ...} entry per circle.
        #[arg(long)]
        data: PathBuf,
        /// Number of negative modes per component.
        #[arg(long, default_value_t = 64)]
        modes: usize,
        /// Fourier cutoff of boundary traces (default: 2 x modes).
        #[arg(long)]
        cutoff: Option<usize>,
        /// Output path for the solution JSON (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the induced metric ell(w) on a grid of points.
    Metric {
        #[arg(long)]
        domain: PathBuf,
        /// Grid JSON: an array of [re, im] points.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 64)]
        modes: usize,
        #[arg(long)]
        cutoff: Option<usize>,
        /// Output path; a .csv extension selects CSV, anything else JSON
        /// (default: JSON on stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the twisted transform matrices W and -W with diagnostics.
    Operators {
        #[arg(long)]
        domain: PathBuf,
        /// Restrict the diagnostics to one component (default: all).
        #[arg(long)]
        component: Option<usize>,
        #[arg(long, default_value_t = 16)]
        modes: usize,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded invariant suite and print a pass/fail table.
    Verify {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        modes: usize,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Closed-form metric values on the annulus 1 < |z| < R.
    Reference {
        /// Outer radius R of the annulus.
        #[arg(long)]
        annulus: f64,
        #[arg(long, value_enum, default_value_t = StructureArg::Even)]
        structure: StructureArg,
        /// Radii |w| to evaluate, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Symmetric truncation of the series.
        #[arg(long, default_value_t = 40)]
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StructureArg {
    Even,
    Odd,
}

impl From<StructureArg> for SpinStructure {
    fn from(v: StructureArg) -> Self {
        match v {
            StructureArg::Even => SpinStructure::Even,
            StructureArg::Odd => SpinStructure::Odd,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter)).init();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let obj = serde_json::json!({
                "error": {
                    "kind": err.kind(),
                    "message": err.to_string(),
                    "exit_code": err.exit_code(),
                }
            });
            eprintln!("{obj}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::BadInput(format!("reading {}: {e}", path.display())))
}

fn load_domain(path: &Path) -> Result<CircleDomain> {
    io::domain_from_json(&read_file(path)?)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)
                .map_err(|e| Error::BadInput(format!("writing {}: {e}", path.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&PathBuf>, value: &T) -> Result<()> {
    emit(out, &io::to_json_pretty(value)?)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve {
            domain,
            data,
            modes,
            cutoff,
            out,
        } => {
            let dom = load_domain(domain)?;
            let cutoff = cutoff.unwrap_or_else(|| default_cutoff(*modes));
            let solver = build_solver(&dom, *modes, cutoff)?;
            let f = io::boundary_from_json(&read_file(data)?, &dom, cutoff)?;
            let (sol, report) = solver.solve_with_report(&f)?;
            let dto = io::SolutionDto {
                modes: *modes,
                cutoff,
                report: io::SolveReportDto::from_report(&report),
                solution: io::holo_to_dto(&sol),
            };
            emit_json(out.as_ref(), &dto)?;
            Ok(0)
        }
        Command::Metric {
            domain,
            grid,
            modes,
            cutoff,
            out,
        } => {
            let dom = load_domain(domain)?;
            let cutoff = cutoff.unwrap_or_else(|| default_cutoff(*modes));
            let solver = build_solver(&dom, *modes, cutoff)?;
            let points = io::grid_from_json(&read_file(grid)?)?;
            let outcomes = metric::metric_grid(&solver, &points)?;
            let csv = out
                .as_ref()
                .map(|p| p.extension().is_some_and(|e| e == "csv"))
                .unwrap_or(false);
            if csv {
                emit(out.as_ref(), &io::grid_to_csv(&outcomes))?;
            } else {
                emit(out.as_ref(), &io::grid_to_json(&outcomes)?)?;
            }
            Ok(0)
        }
        Command::Operators {
            domain,
            component,
            modes,
            cutoff,
            out,
        } => {
            let dom = load_domain(domain)?;
            let cutoff = cutoff.unwrap_or_else(|| default_cutoff(*modes));
            let solver = build_solver(&dom, *modes, cutoff)?;
            let (w, w_inv) = solver.w_transform(cutoff)?;
            let dto = io::OperatorsDto {
                modes: *modes,
                cutoff,
                dim: w.nrows(),
                diagnostics: io::collect_diagnostics(&solver, *component)?,
                w: io::matrix_rows(&w),
                w_inv: io::matrix_rows(&w_inv),
            };
            emit_json(out.as_ref(), &dto)?;
            Ok(0)
        }
        Command::Verify {
            domain,
            seed,
            modes,
            cutoff,
        } => {
            let dom = load_domain(domain)?;
            let cutoff = cutoff.unwrap_or_else(|| default_cutoff(*modes));
            let report = verify::run_verification(&dom, *modes, cutoff, *seed)?;
            if cli.json {
                print!("{}", io::to_json_pretty(&report)?);
            } else {
                print!("{}", verify::render_table(&report));
            }
            Ok(if report.all_pass { 0 } else { 2 })
        }
        Command::Reference {
            annulus,
            structure,
            radii,
            k,
        } => {
            #[derive(Serialize)]
            struct Row {
                radius: f64,
                value: f64,
                tail_bound: f64,
            }
            let mut rows = Vec::with_capacity(radii.len());
            for &r in radii {
                let w = Complex64::new(r, 0.0);
                let value = metric::annulus_reference(w, *annulus, (*structure).into(), *k)?;
                let tail_bound =
                    metric::annulus_reference_tail_bound(w, *annulus, (*structure).into(), *k);
                rows.push(Row {
                    radius: r,
                    value,
                    tail_bound,
                });
            }
            if cli.json {
                print!("{}", io::to_json_pretty(&rows)?);
            } else {
                println!("{:>10} {:>22} {:>12}", "radius", "value", "tail_bound");
                for row in &rows {
                    println!(
                        "{:>10} {:>22.15} {:>12.3e}",
                        row.radius, row.value, row.tail_bound
                    );
                }
            }
            Ok(0)
        }
    }
}
