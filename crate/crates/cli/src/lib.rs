//! Command-line front end: argument parsing, file I/O and exit codes.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cpsd_core::constructions as cons;
use cpsd_core::sdp::{self, SdpStatus};
use cpsd_core::seesaw::{run_seesaw, SeesawConfig, SeesawStatus};
use cpsd_core::types::PsdFactorization;
use cpsd_core::verify::{self, CheckReport, Sizes};
use cpsd_core::{DenseMatrix, Field};
use thiserror::Error;

use format::ParseError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Environment variable overriding the default equality tolerance.
pub const TOL_ENV: &str = "CPSD_TOL";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] cpsd_core::Error),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) | CliError::Core(cpsd_core::Error::SolverFailure(_)) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "cpsd", version, about = "Completely positive semidefinite matrices: constructions, factorizations and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a matrix, factor family or certificate.
    #[command(subcommand)]
    Construct(Construct),
    /// Search for PSD factors of a given size with the seesaw heuristic.
    Factorize(FactorizeArgs),
    /// Check a matrix, factor family or certificate.
    #[command(subcommand)]
    Verify(Verify),
    /// Print rank-based lower bounds on the real and complex cpsd ranks.
    Bound {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Restrict a factor family to the range of its sum.
    Compress {
        #[arg(long)]
        factors: PathBuf,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Minimize <Omega, E> over the elliptope.
    SolveElliptope {
        #[arg(long)]
        omega: PathBuf,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Nonnegative weights for the Tsirelson relation of a C-system.
    TsirelsonWeights {
        #[arg(long)]
        csystem: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TolArg {
    /// Equality tolerance; defaults to $CPSD_TOL, then 1e-8.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// The 2k x 2k matrix M_k.
    Mk {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArg,
        /// Also write the Hadamard factorization of size k.
        #[arg(long)]
        factors: Option<PathBuf>,
        #[arg(long, default_value = "complex")]
        field: Field,
    },
    /// A Hadamard matrix of the given order.
    Hadamard {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "complex")]
        field: Field,
        #[command(flatten)]
        out: OutArg,
    },
    /// An extreme point of the elliptope of rank r.
    ElliptopeExtreme {
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// The extremal correlation C_1 with its certificate.
    C1 {
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        out: OutArg,
        /// Also write the realizing unit vectors.
        #[arg(long)]
        csystem: Option<PathBuf>,
    },
    /// The extremal correlation C_2 with its certificate.
    C2 {
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        out: OutArg,
        #[arg(long)]
        csystem: Option<PathBuf>,
    },
    /// Clifford generators on r letters.
    Clifford {
        #[arg(long)]
        r: usize,
        /// Use the irreducible representation of size 2^floor(r/2).
        #[arg(long)]
        irreducible: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// The matrix with Hermitian PSD factors of size 2^k built from C_1.
    MainTheorem {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArg,
        #[arg(long)]
        factors: Option<PathBuf>,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value = "real")]
    pub field: Field,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Target value of the error E.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArg,
    /// Error trace of the best restart, one value per line.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Gram matrix of the factors against the matrix.
    Gram {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        factors: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Every factor is Hermitian PSD of the declared size.
    Psd {
        #[arg(long)]
        factors: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Extremality certificate (C, E, Omega).
    Certificate {
        #[arg(long)]
        cert: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Anticommutation relations of a family of matrices.
    Clifford {
        #[arg(long)]
        factors: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Linear sums of a matrix built from a quantum correlation.
    Quantum {
        #[arg(long)]
        matrix: PathBuf,
        /// Outcome and question counts as a,b,s,t.
        #[arg(long, value_parser = parse_sizes)]
        sizes: Sizes,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Extreme point test for a correlation matrix.
    ElliptopeExtreme {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        tol: TolArg,
    },
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("sizes must be four integers a,b,s,t: {e}"))?;
    match v[..] {
        [a, b, s, t] => Ok((a, b, s, t)),
        _ => Err(format!("expected four sizes a,b,s,t, got {}", v.len())),
    }
}

fn tolerance(arg: &TolArg) -> CliResult<f64> {
    let tol = match arg.tol {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}='{v}' is not a number")))?,
            Err(_) => verify::DEFAULT_CHECK_TOL,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T, ParseError>) -> CliResult<T> {
    parse(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_to(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &OutArg, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match &out.out {
        Some(p) => write_to(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn report(r: &CheckReport, stdout: &mut dyn Write) -> CliResult<i32> {
    let _ = write!(stdout, "{r}");
    Ok(if r.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Construct(c) => construct(c, stdout),
        Command::Factorize(a) => factorize(a, stdout),
        Command::Verify(v) => verify_cmd(v, stdout),
        Command::Bound { matrix, tol } => {
            let m = load(&matrix, format::parse_matrix)?;
            let (real, complex) = verify::cpsd_lower_bounds(&m, tolerance(&tol)?)?;
            let _ = writeln!(stdout, "real_bound {real}\ncomplex_bound {complex}");
            Ok(EXIT_OK)
        }
        Command::Compress { factors, out, tol } => {
            let f = load(&factors, format::parse_factors)?;
            let c = verify::compress_factorization(&f, tolerance(&tol)?)?;
            emit(&out, &format::render_factors(&c), stdout)?;
            Ok(EXIT_OK)
        }
        Command::SolveElliptope { omega, out, tol } => {
            let w = load(&omega, format::parse_matrix)?;
            let sol = sdp::solve_elliptope_min(&w, tolerance(&tol)?)?;
            if sol.status != SdpStatus::Optimal {
                return Err(CliError::Numeric(format!(
                    "elliptope SDP ended with status {:?} after {} iterations",
                    sol.status, sol.iterations
                )));
            }
            emit(&out, &format::render_matrix(&sol.x), stdout)?;
            if out.out.is_some() {
                let _ = writeln!(stdout, "value {}", format::render_scalar(sol.objective_value));
            }
            Ok(EXIT_OK)
        }
        Command::TsirelsonWeights { csystem, tol } => {
            let sys = load(&csystem, format::parse_csystem)?;
            let w = verify::tsirelson_weights(&sys, tolerance(&tol)?);
            let join = |v: &[f64]| v.iter().map(|x| format::render_scalar(*x)).collect::<Vec<_>>().join(" ");
            let _ = writeln!(stdout, "lambdas {}", join(&w.lambdas));
            let _ = writeln!(stdout, "mus {}", join(&w.mus));
            let _ = writeln!(stdout, "residual {}", format::render_scalar(w.residual));
            let _ = writeln!(stdout, "min_weight {}", format::render_scalar(w.min_weight()));
            Ok(EXIT_OK)
        }
    }
}

fn construct(c: Construct, stdout: &mut dyn Write) -> CliResult<i32> {
    match c {
        Construct::Mk { k, out, factors, field } => {
            emit(&out, &format::render_matrix(&cons::build_mk(k)?), stdout)?;
            if let Some(p) = factors {
                write_to(&p, &format::render_factors(&cons::hadamard_factorization_mk(k, field)?))?;
            }
        }
        Construct::Hadamard { order, field, out } => {
            let h = match field {
                Field::Real => cons::real_hadamard(order)?,
                Field::Complex => cons::complex_hadamard(order)?,
            };
            emit(&out, &format::render_matrix(&h), stdout)?;
        }
        Construct::ElliptopeExtreme { r, out } => {
            emit(&out, &format::render_matrix(&cons::elliptope_extreme_example(r)?), stdout)?;
        }
        Construct::C1 { r, out, csystem } => {
            let (cert, sys) = cons::build_c1(r)?;
            emit(&out, &format::render_certificate(&cert), stdout)?;
            if let Some(p) = csystem {
                write_to(&p, &format::render_csystem(&sys))?;
            }
        }
        Construct::C2 { r, out, csystem } => {
            let (cert, sys) = cons::build_c2(r)?;
            emit(&out, &format::render_certificate(&cert), stdout)?;
            if let Some(p) = csystem {
                write_to(&p, &format::render_csystem(&sys))?;
            }
        }
        Construct::Clifford { r, irreducible, out } => {
            let gens = if irreducible {
                cons::clifford_irreducible(r)?
            } else {
                cons::clifford_phi(r)?
            };
            let d = gens[0].rows();
            let bundle = PsdFactorization {
                field: Field::Complex,
                d,
                target: DenseMatrix::zeros(0, 0),
                factors: gens,
            };
            emit(&out, &format::render_factors(&bundle), stdout)?;
        }
        Construct::MainTheorem {
            k,
            out,
            factors,
            certificate,
        } => {
            let (m, f, cert) = cons::main_theorem_matrix(k)?;
            emit(&out, &format::render_matrix(&m), stdout)?;
            if let Some(p) = factors {
                write_to(&p, &format::render_factors(&f))?;
            }
            if let Some(p) = certificate {
                write_to(&p, &format::render_certificate(&cert))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn factorize(a: FactorizeArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let m = load(&a.matrix, format::parse_matrix)?;
    let mut config = SeesawConfig::new(a.dim, a.field);
    config.restarts = a.restarts;
    config.seed = a.seed;
    config.max_iter = a.max_iter;
    config.target_error = a.tol;
    let result = run_seesaw(&m, &config)?;
    emit(&a.out, &format::render_factors(&result.best), stdout)?;
    if let Some(p) = &a.trace {
        let text: String = result
            .error_trace
            .iter()
            .map(|e| format!("{}\n", format::render_scalar(*e)))
            .collect();
        write_to(p, &text)?;
    }
    if result.status == SeesawStatus::Converged {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Numeric(format!(
            "seesaw did not reach {:e}: best error {:e} (restart {})",
            a.tol, result.final_error, result.best_restart
        )))
    }
}

fn verify_cmd(v: Verify, stdout: &mut dyn Write) -> CliResult<i32> {
    match v {
        Verify::Gram { matrix, factors, tol } => {
            let m = load(&matrix, format::parse_matrix)?;
            let f = load(&factors, format::parse_factors)?;
            report(&verify::check_gram(&m, &f, tolerance(&tol)?)?, stdout)
        }
        Verify::Psd { factors, tol } => {
            let f = load(&factors, format::parse_factors)?;
            report(&verify::check_psd_family(&f, tolerance(&tol)?)?, stdout)
        }
        Verify::Certificate { cert, tol } => {
            let c = load(&cert, format::parse_certificate)?;
            report(&verify::check_extension_certificate(&c, tolerance(&tol)?)?, stdout)
        }
        Verify::Clifford { factors, tol } => {
            let f = load(&factors, format::parse_factors)?;
            report(&verify::check_clifford_relations(&f.factors, tolerance(&tol)?)?, stdout)
        }
        Verify::Quantum { matrix, sizes, tol } => {
            let m = load(&matrix, format::parse_matrix)?;
            report(&verify::check_quantum_consistency(&m, sizes, tolerance(&tol)?)?, stdout)
        }
        Verify::ElliptopeExtreme { matrix, tol } => {
            let e = load(&matrix, format::parse_matrix)?;
            match verify::check_elliptope_extreme(&e, tolerance(&tol)?) {
                Ok(r) => report(&r, stdout),
                Err(cpsd_core::Error::NotCorrelationMatrix(msg)) => {
                    let _ = writeln!(stdout, "FAILED: not a correlation matrix: {msg}");
                    Ok(EXIT_VERIFY_FAILED)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}
