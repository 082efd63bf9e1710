//! The `jacobilab` command line.
//!
//! Exit codes: 0 clean, 2 usage or parse error, 3 invalid tensor,
//! 4 refutation or a red probe section.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use crate::admissibility::{dimension_screen, rho};
use crate::curvature::{build_r0, build_rp, build_two_root_model, SkewEndomorphism, Sign, TwoRootModelParams};
use crate::error::Error;
use crate::linalg::random_orthogonal;
use crate::report::{self, RunConfig};
use crate::spectral::DEFAULT_SAMPLES;
use crate::tensor_io::{read_tensor, write_tensor};
use crate::AlgebraicCurvatureTensor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_TENSOR: i32 = 3;
pub const EXIT_REFUTED: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "jacobilab", version, about = "Jacobi operator spectra and two-root curvature tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a model tensor file.
    Build(BuildArgs),
    /// k-root, Osserman and k-stein analysis.
    Analyze(RunArgs),
    /// Structural identity checks.
    Probe(RunArgs),
    /// Simple-root factorization pipeline.
    Factorize(RunArgs),
    /// Hurwitz–Radon number.
    Rho { n: u64 },
    /// Dimension screen for two-root tensors.
    Screen { n: usize },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    R0,
    Rp,
    TwoRoot,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    /// Comma-separated, non-increasing, one per frame pair.
    #[arg(long, value_delimiter = ',')]
    nus: Vec<f64>,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: Sign,
    /// Random orthonormal frame from this seed instead of the standard basis.
    #[arg(long)]
    frame_seed: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Build(a) => cmd_build(&a),
        Command::Analyze(a) => cmd_run(&a, "analyze"),
        Command::Probe(a) => cmd_run(&a, "probe"),
        Command::Factorize(a) => cmd_run(&a, "factorize"),
        Command::Rho { n } => {
            if n == 0 {
                eprintln!("error: rho needs n >= 1");
                return EXIT_USAGE;
            }
            println!("{}", rho(n));
            EXIT_OK
        }
        Command::Screen { n } => match dimension_screen(n) {
            Ok(s) => {
                println!("{}", s.message);
                match s.q_range {
                    Some((lo, hi)) => println!("rho({n}) = {}; admissible q in [{lo}, {hi}]", s.rho),
                    None => println!("rho({n}) = {}; no admissible q", s.rho),
                }
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
    }
}

fn frame_for(dim: usize, seed: Option<u64>) -> DMatrix<f64> {
    seed.map_or_else(|| DMatrix::identity(dim, dim), |s| random_orthogonal(dim, s))
}

fn build_model(a: &BuildArgs) -> Result<(AlgebraicCurvatureTensor, String), Error> {
    match a.model {
        Model::R0 => {
            if a.dim < 2 {
                return Err(Error::InvalidParams(format!("--dim must be at least 2, got {}", a.dim)));
            }
            Ok((build_r0(a.dim), format!("dim {} model r0", a.dim)))
        }
        Model::Rp => {
            if a.dim % 2 == 1 {
                return Err(Error::InvalidParams(format!(
                    "--dim {} is odd; a paired frame needs an even dimension",
                    a.dim
                )));
            }
            let p = SkewEndomorphism::from_frame(&frame_for(a.dim, a.frame_seed), &a.nus)?;
            Ok((build_rp(&p), format!("dim {} model rp nus {:?}", a.dim, a.nus)))
        }
        Model::TwoRoot => {
            let params = TwoRootModelParams::new(a.dim, a.mu, a.nus.clone(), frame_for(a.dim, a.frame_seed), a.sign)?;
            Ok((
                build_two_root_model(&params)?,
                format!(
                    "dim {} model two-root mu {} nus {:?} sign {:+}",
                    a.dim,
                    a.mu,
                    a.nus,
                    a.sign.value()
                ),
            ))
        }
    }
}

fn cmd_build(a: &BuildArgs) -> i32 {
    let (tensor, summary) = match build_model(a) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = write_tensor(&a.output, &tensor) {
        eprintln!("error: cannot write {}: {e}", a.output.display());
        return EXIT_USAGE;
    }
    println!("{summary} -> {}", a.output.display());
    EXIT_OK
}

fn load(path: &Path) -> Result<AlgebraicCurvatureTensor, i32> {
    read_tensor(path).map_err(|e| {
        let code = match e {
            Error::SymmetryConflict { .. } | Error::BianchiViolation { .. } | Error::NotCurvatureTensor { .. } => {
                EXIT_INVALID_TENSOR
            }
            _ => EXIT_USAGE,
        };
        match &e {
            Error::Json(j) => eprintln!(
                "error: {}: parse error at line {}, column {}: {j}",
                path.display(),
                j.line(),
                j.column()
            ),
            _ => eprintln!("error: {}: {e}", path.display()),
        }
        code
    })
}

fn emit(output: Option<&Path>, json: &str) -> Result<(), i32> {
    if let Some(path) = output {
        fs::write(path, json).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_USAGE
        })?;
    }
    Ok(())
}

fn cmd_run(a: &RunArgs, command: &str) -> i32 {
    if a.samples == 0 {
        eprintln!("error: --samples must be at least 1");
        return EXIT_USAGE;
    }
    if !(a.rel_tol > 0.0) {
        eprintln!("error: --rel-tol must be positive");
        return EXIT_USAGE;
    }
    let tensor = match load(&a.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let config = RunConfig {
        command: command.into(),
        input: a.input.display().to_string(),
        samples: a.samples,
        seed: a.seed,
        rel_tol: a.rel_tol,
    };
    let result = match command {
        "analyze" => report::analyze(&tensor, config).map(|r| (report::to_json(&r), r.summary(), EXIT_OK)),
        "probe" => report::probe(&tensor, config).map(|r| {
            let code = if r.any_red() { EXIT_REFUTED } else { EXIT_OK };
            (report::to_json(&r), r.summary(), code)
        }),
        _ => report::factorize(&tensor, config).map(|r| {
            let code = if r.is_certified() { EXIT_OK } else { EXIT_REFUTED };
            (report::to_json(&r), r.summary(), code)
        }),
    };
    match result {
        Ok((json, summary, code)) => {
            if let Err(c) = emit(a.output.as_deref(), &json) {
                return c;
            }
            print!("{summary}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
