//! The `ghcodes` command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or invalid input,
//! 3 a size cap was exceeded, 4 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    analyze_matrix, max_size_from_env, verify_theorems, AnalysisOptions, KernelMode,
};
use crate::construction::{build_capped, GeneratorMatrix, TypeSignature, DEFAULT_BUILD_CAP};
use crate::error::{Error, Result};
use crate::format::{matrix_to_json, read_matrix, write_gray_image, write_gray_rows, write_span};
use crate::grid::{run_grid, write_atomic, GridSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ghcodes", version, about = "Additive generalized Hadamard codes over Z_p × … × Z_{p^s}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the generator matrix A_p^{t_1,…,t_s}.
    Construct {
        #[command(flatten)]
        sig: SignatureArgs,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Text)]
        format: MatrixFormat,
    },
    /// Print the Gray image of the code, one digit string per codeword.
    Gray {
        #[command(flatten)]
        source: SourceArgs,
        /// Only map the generator rows.
        #[arg(long)]
        rows: bool,
    },
    /// Print every codeword of the additive code in row syntax.
    Span {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Verify the structural properties of one code.
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value_t = KernelArg::Auto)]
        kernel: KernelArg,
        /// Emit the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Analyze every admissible signature within a size cap.
    Grid {
        /// Comma-separated primes; empty for an empty grid.
        #[arg(long, default_value = "2,3")]
        primes: String,
        /// Comma-separated values of s.
        #[arg(long = "s-values", default_value = "2,3")]
        s_values: String,
        /// Largest |C| included [default: GHCODES_MAX_SIZE or 65536].
        #[arg(long)]
        max_size: Option<u64>,
        /// Write the full JSON summary, including every report, here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the CSV summary here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// `a,b,c` or the empty string.
fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Domain(format!("{flag}: {x:?} is not a nonnegative integer")))
        })
        .collect()
}

#[derive(Debug, Args)]
struct SignatureArgs {
    /// The prime p.
    #[arg(short = 'p')]
    p: u32,
    /// Number of blocks; must match the length of -t.
    #[arg(short = 's')]
    s: Option<usize>,
    /// Abelian type t_1,…,t_s.
    #[arg(short = 't', value_delimiter = ',', required = true)]
    t: Vec<usize>,
}

impl SignatureArgs {
    fn signature(&self) -> Result<TypeSignature> {
        if let Some(s) = self.s {
            if s != self.t.len() {
                return Err(Error::Domain(format!(
                    "-s {s} but -t lists {} values",
                    self.t.len()
                )));
            }
        }
        TypeSignature::new(self.p, self.t.clone())
    }
}

#[derive(Debug, Args)]
struct SourceArgs {
    #[arg(short = 'p', required_unless_present = "matrix", conflicts_with = "matrix")]
    p: Option<u32>,
    #[arg(short = 's', conflicts_with = "matrix")]
    s: Option<usize>,
    #[arg(short = 't', value_delimiter = ',', required_unless_present = "matrix", conflicts_with = "matrix")]
    t: Vec<usize>,
    /// Read the generator matrix from a text or JSON file.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

impl SourceArgs {
    fn matrix(&self, cap: u64) -> Result<GeneratorMatrix> {
        match (&self.matrix, self.p) {
            (Some(path), _) => read_matrix(BufReader::new(File::open(path)?)),
            (None, Some(p)) => {
                let sig = SignatureArgs {
                    p,
                    s: self.s,
                    t: self.t.clone(),
                }
                .signature()?;
                build_capped(&sig, cap)
            }
            (None, None) => Err(Error::Domain("give -p/-t or --matrix".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Auto,
    Brute,
    Basis,
}

impl From<KernelArg> for KernelMode {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Auto => KernelMode::Auto,
            KernelArg::Brute => KernelMode::Brute,
            KernelArg::Basis => KernelMode::Basis,
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse { .. } | Error::Json(_) => EXIT_USAGE,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Integrity(_) => EXIT_CHECK_FAILED,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        // a closed pipe on stdout is not an error, e.g. `ghcodes gray … | head`
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "ghcodes: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let env_cap = max_size_from_env()?;
    match command {
        Command::Construct { sig, format } => {
            let a = build_capped(&sig.signature()?, env_cap.unwrap_or(DEFAULT_BUILD_CAP))?;
            match format {
                MatrixFormat::Text => write!(out, "{a}")?,
                MatrixFormat::Json => writeln!(out, "{}", matrix_to_json(&a)?)?,
            }
            Ok(EXIT_OK)
        }
        Command::Gray { source, rows } => {
            let cap = env_cap.unwrap_or(AnalysisOptions::default().max_size);
            let a = source.matrix(env_cap.unwrap_or(DEFAULT_BUILD_CAP))?;
            if rows {
                write_gray_rows(&a, out)?;
            } else {
                write_gray_image(&a, cap, out)?;
            }
            Ok(EXIT_OK)
        }
        Command::Span { source } => {
            let cap = env_cap.unwrap_or(AnalysisOptions::default().max_size);
            let a = source.matrix(env_cap.unwrap_or(DEFAULT_BUILD_CAP))?;
            write_span(&a, cap, out)?;
            Ok(EXIT_OK)
        }
        Command::Analyze {
            source,
            kernel,
            json,
        } => {
            let mut opts = AnalysisOptions::from_env()?;
            opts.kernel = kernel.into();
            let report = match source.matrix.is_some() {
                true => analyze_matrix(&source.matrix(opts.max_size)?, &opts)?,
                false => {
                    let sig = SignatureArgs {
                        p: source.p.unwrap_or_default(),
                        s: source.s,
                        t: source.t.clone(),
                    }
                    .signature()?;
                    verify_theorems(&sig, &opts)?
                }
            };
            if json {
                writeln!(out, "{}", report.to_json()?)?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Grid {
            primes,
            s_values,
            max_size,
            out: json_path,
            csv,
        } => {
            let spec = GridSpec {
                primes: parse_list("--primes", &primes)?,
                s_values: parse_list("--s-values", &s_values)?,
                max_size: max_size.or(env_cap).unwrap_or(GridSpec::default().max_size),
            };
            let opts = AnalysisOptions {
                max_size: spec.max_size,
                ..AnalysisOptions::default()
            };
            let summary = run_grid(&spec, &opts)?;
            write!(out, "{}", summary.to_table())?;
            if let Some(path) = json_path {
                let text = serde_json::to_string_pretty(&summary)?;
                write_atomic(&path, text.as_bytes())?;
            }
            if let Some(path) = csv {
                let mut buf = Vec::new();
                summary.write_csv(&mut buf)?;
                write_atomic(&path, &buf)?;
            }
            Ok(if summary.all_passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}
