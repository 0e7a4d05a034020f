//! `gromov`: validate, build, rebuild and combine tree matrices, and drive
//! the simulation experiments.
//!
//! Exit codes: 0 on success, 1 when an input fails validation (or cannot be
//! read), 2 on command-line usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gromov_cli::config::ExperimentConfig;
use gromov_cli::drivers::run_experiment;
use gromov_core::combine::{convex, g_convex, trace_path, CombinationWeights};
use gromov_core::io;
use gromov_core::matrix::{gv_adjacency, GromovMatrix};
use gromov_core::program::decompose;
use gromov_core::reconstruct::reconstruct_tree;
use gromov_core::spectral::lambda_min;
use gromov_core::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "gromov", version, about = "Tree matrices: validation, construction, combination and network inference")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum CombineMode {
    Convex,
    Gconvex,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the Gromov matrix conditions; prints the first violation.
    Validate { matrix: PathBuf },
    /// Compute the Gromov matrix of a base file.
    Build {
        base: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rebuild the canonical base tree encoded by a matrix.
    Reconstruct {
        matrix: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convex or G-convex combination of two or more matrices.
    Combine {
        #[arg(long, value_enum)]
        mode: CombineMode,
        /// Comma-separated weights summing to 1.
        #[arg(long)]
        weights: String,
        #[arg(required = true, num_args = 1..)]
        matrices: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lower bound on the smallest eigenvalue from a program or base file.
    Bound { input: PathBuf },
    /// Smallest eigenvalue of a symmetric matrix.
    Eigmin { matrix: PathBuf },
    /// 0/1 adjacency of base nodes whose connecting path avoids the rest.
    Gv {
        matrix: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample the combination path between two matrices and report bends.
    Trace {
        m1: PathBuf,
        m2: PathBuf,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Write theta-indexed samples as CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment config; writes trials.csv, summary.csv,
    /// plotdata.csv.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (also a `jobs=` config key).
        #[arg(long)]
        jobs: Option<usize>,
        /// key=value overrides applied after the config file.
        #[arg(long = "set")]
        set: Vec<String>,
    },
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_gromov(path: &Path) -> anyhow::Result<GromovMatrix> {
    let sym = io::read_matrix(path)?;
    GromovMatrix::try_new(sym, DEFAULT_TOL)
        .map_err(|v| anyhow::anyhow!("{}: {v}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Validate { matrix } => {
            let sym = io::read_matrix(&matrix)?;
            match GromovMatrix::try_new(sym, DEFAULT_TOL) {
                Ok(_) => println!("ok"),
                Err(v) => anyhow::bail!("{v}"),
            }
        }
        Cmd::Build { base, output } => {
            let b = io::parse_base(&std::fs::read_to_string(&base)?)?;
            emit(&io::write_matrix_csv(b.gromov_matrix().as_sym()), output.as_deref())?;
        }
        Cmd::Reconstruct { matrix, output } => {
            let m = load_gromov(&matrix)?;
            let base = reconstruct_tree(&m)?;
            emit(&io::write_base(&base), output.as_deref())?;
        }
        Cmd::Combine { mode, weights, matrices, output } => {
            let alpha: Vec<f64> = weights
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| anyhow::anyhow!("could not parse --weights {weights:?}"))?;
            let w = CombinationWeights::new(alpha, DEFAULT_TOL)?;
            let mats: Vec<GromovMatrix> =
                matrices.iter().map(|p| load_gromov(p)).collect::<Result<_, _>>()?;
            let text = match mode {
                CombineMode::Convex => io::write_matrix_csv(&convex(&mats, &w)?),
                CombineMode::Gconvex => io::write_matrix_csv(g_convex(&mats, &w)?.as_sym()),
            };
            emit(&text, output.as_deref())?;
        }
        Cmd::Bound { input } => {
            let text = std::fs::read_to_string(&input)?;
            let first = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .find(|l| !l.is_empty())
                .unwrap_or("");
            let program = if first == "tree" {
                decompose(&io::parse_base(&text)?)?
            } else {
                io::parse_program(&text)?
            };
            println!("{}", program.lambda_min_bound());
        }
        Cmd::Eigmin { matrix } => {
            let sym = io::read_matrix(&matrix)?;
            println!("{}", lambda_min(&sym));
        }
        Cmd::Gv { matrix, output } => {
            let m = load_gromov(&matrix)?;
            let adj = gv_adjacency(&m, DEFAULT_TOL);
            let mut text = String::new();
            for row in adj {
                let cells: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            emit(&text, output.as_deref())?;
        }
        Cmd::Trace { m1, m2, grid, output } => {
            let a = load_gromov(&m1)?;
            let b = load_gromov(&m2)?;
            let trace = trace_path(&a, &b, grid)?;
            println!("samples,{}", trace.samples.len());
            for t in &trace.turning_points {
                println!("turning_point,{t}");
            }
            if let Some(path) = output {
                let n = a.dim();
                let mut text = String::from("theta");
                for i in 0..n {
                    for j in 0..n {
                        text.push_str(&format!(",m{}{}", i + 1, j + 1));
                    }
                }
                text.push('\n');
                for (theta, m) in &trace.samples {
                    text.push_str(&format!("{theta}"));
                    for i in 0..n {
                        for j in 0..n {
                            text.push_str(&format!(",{}", m.get(i, j)));
                        }
                    }
                    text.push('\n');
                }
                std::fs::write(path, text)?;
            }
        }
        Cmd::Simulate { config, out, jobs, set } => {
            let mut overrides = set;
            if let Some(j) = jobs {
                overrides.push(format!("jobs={j}"));
            }
            let cfg = ExperimentConfig::load(&config, &overrides)?;
            let report = run_experiment(&cfg)?;
            let written = report.write(&out)?;
            print!("{}", report.summary_csv());
            for path in written {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
