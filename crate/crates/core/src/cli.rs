//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property false (a witness is printed), 2 usage or
//! input error, 3 enumeration cap exceeded. Coordinates are 1-based on the
//! command line and in every output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::batch::{BatchOutcome, BatchRequest, SampleOutcome, Verifier};
use crate::constructions::{grid_parity, random_systematic, replication, single_parity};
use crate::error::Error;
use crate::field::Field;
use crate::tensor::{greedy_family, theorem_bound, verify_certificate, Certificate};
use crate::{bounds, Config, LinearCode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "batchlab",
    version,
    about = "Exact verification of linear batch codes"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Output mode; `json` prints one document mirroring the text lines.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Row-reduce the code file into `[I | A]` form, reporting the column
    /// permutation. Changes which coordinates are systematic.
    #[arg(long, global = true)]
    systematize: bool,
    /// Dual codewords enumerated per code [default: 2^20].
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    dual_cap: Option<u64>,
    /// Request multisets checked exhaustively [default: 2^22].
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    multiset_cap: Option<u64>,
    /// Good basis tensors walked by `certify` [default: 2^20].
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    tensor_cap: Option<u64>,
    /// Messages enumerated by `distance` [default: 2^22].
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    codeword_cap: Option<u64>,
    /// Seed for `--sample` and `construct random`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for verification; 1 forces sequential execution.
    #[arg(long, global = true, env = "BATCHLAB_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the code is k-batch.
    Verify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        k: usize,
        /// Check this many random requests instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Print a recovery plan for one request.
    Serve {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        request: Vec<usize>,
    },
    /// Largest k for which the code is k-batch.
    BatchNumber {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Build and write a tensor-rank certificate.
    Certify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recheck a certificate against a code file.
    CheckCert {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Write a code file for one of the built-in families.
    Construct {
        #[command(subcommand)]
        family: Family,
    },
    /// Write the redundancy-exponent curves as CSV and SVG.
    Bounds {
        #[arg(long)]
        grid_step: f64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Minimum Hamming distance by brute force.
    Distance {
        #[arg(long)]
        code: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Field order (a prime up to 251).
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Family {
    Replication {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        target: Target,
    },
    SingleParity {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        target: Target,
    },
    GridParity {
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        target: Target,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        target: Target,
    },
}

/// What a command prints: text lines and the equivalent JSON document.
struct Report {
    exit: i32,
    lines: Vec<String>,
    doc: serde_json::Map<String, Value>,
}

impl Report {
    fn new(command: &str) -> Self {
        let mut doc = serde_json::Map::new();
        doc.insert("command".into(), json!(command));
        Report {
            exit: EXIT_OK,
            lines: Vec::new(),
            doc,
        }
    }

    fn line(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn set(&mut self, key: &str, value: Value) {
        self.doc.insert(key.into(), value);
    }
}

struct Failure {
    exit: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            exit: if e.is_cap_exceeded() {
                EXIT_CAP
            } else {
                EXIT_USAGE
            },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        exit: EXIT_USAGE,
        message: message.into(),
    }
}

impl GlobalArgs {
    fn config(&self) -> Config {
        let d = Config::default();
        Config {
            dual_cap: self.dual_cap.map_or(d.dual_cap, u128::from),
            multiset_cap: self.multiset_cap.map_or(d.multiset_cap, u128::from),
            tensor_cap: self.tensor_cap.map_or(d.tensor_cap, u128::from),
            codeword_cap: self.codeword_cap.map_or(d.codeword_cap, u128::from),
            threads: self.threads.map(|t| t as usize),
            seed: self.seed,
        }
    }
}

/// Process entry point: parses `std::env::args` and writes to stdout/stderr.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one command line (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let format = cli.global.format;
    let result = execute(&cli);
    let written = match (&result, format) {
        (Ok(report), Format::Text) => report.lines.iter().try_for_each(|l| writeln!(out, "{l}")),
        (Ok(report), Format::Json) => writeln!(out, "{}", Value::Object(report.doc.clone())),
        (Err(f), Format::Text) => writeln!(err, "error: {}", f.message),
        (Err(f), Format::Json) => {
            writeln!(out, "{}", json!({ "error": f.message, "exit": f.exit }))
        }
    };
    if written.is_err() {
        return EXIT_USAGE;
    }
    match result {
        Ok(report) => report.exit,
        Err(f) => f.exit,
    }
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let g = &cli.global;
    let config = g.config();
    match &cli.command {
        Command::Verify { code, k, sample } => {
            let mut r = Report::new("verify");
            let code = load_code(code, g.systematize, &mut r)?;
            let v = Verifier::new(&code, config.clone())?;
            r.set("k", json!(k));
            match sample {
                Some(s) => match v.sample_k_batch(*k, *s, config.seed) {
                    SampleOutcome::NoCounterexample { samples } => {
                        r.line(format!("NO COUNTEREXAMPLE IN {samples} SAMPLES"));
                        r.set("result", json!("no-counterexample"));
                        r.set("samples", json!(samples));
                    }
                    SampleOutcome::Counterexample(req) => counterexample(&mut r, &req),
                },
                None => match v.is_k_batch(*k)? {
                    BatchOutcome::Batch => {
                        r.line("OK");
                        r.set("result", json!("ok"));
                    }
                    BatchOutcome::Counterexample(req) => counterexample(&mut r, &req),
                },
            }
            Ok(r)
        }
        Command::Serve { code, request } => {
            let mut r = Report::new("serve");
            let code = load_code(code, g.systematize, &mut r)?;
            let zero_based = request
                .iter()
                .map(|&i| {
                    i.checked_sub(1)
                        .ok_or_else(|| usage("request indices are 1-based"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let req = BatchRequest::new(zero_based, code.dimension())?;
            let v = Verifier::new(&code, config)?;
            match v.serve(&req) {
                Some(plan) => {
                    let sets: Vec<Value> = plan
                        .sets
                        .iter()
                        .map(|s| {
                            r.line(s.to_string());
                            json!({
                                "target": s.target + 1,
                                "positions": s.positions.iter().map(|p| p + 1).collect::<Vec<_>>(),
                                "coefficients": s.coefficients,
                            })
                        })
                        .collect();
                    r.set("result", json!("ok"));
                    r.set("plan", Value::Array(sets));
                }
                None => {
                    r.line(format!("UNSERVABLE {req}"));
                    r.set("result", json!("unservable"));
                    r.set("request", json!(one_based(req.indices())));
                    r.exit = EXIT_FALSE;
                }
            }
            Ok(r)
        }
        Command::BatchNumber { code, max_k } => {
            let mut r = Report::new("batch-number");
            let code = load_code(code, g.systematize, &mut r)?;
            let b = Verifier::new(&code, config)?.batch_number(*max_k)?;
            r.line(b.to_string());
            r.set("batch_number", json!(b));
            Ok(r)
        }
        Command::Certify { code, k, out } => {
            let mut r = Report::new("certify");
            let code = load_code(code, g.systematize, &mut r)?;
            let v = Verifier::new(&code, config.clone())?;
            let cert = match greedy_family(&v, *k, &config) {
                Ok(cert) => cert,
                Err(Error::NotBatch { request, .. }) => {
                    r.line(format!("COUNTEREXAMPLE {}", join(&request)));
                    r.set("result", json!("counterexample"));
                    r.set("witness", json!(request));
                    r.exit = EXIT_FALSE;
                    return Ok(r);
                }
                Err(e) => return Err(e.into()),
            };
            verify_certificate(&cert, &code)
                .map_err(|f| Error::Inconsistent(format!("fresh certificate rejected: {f}")))?;
            write_file(out, &cert.to_json())?;
            let bound = theorem_bound(code.dimension(), code.length(), *k);
            r.line(format!(
                "CERTIFIED t={} d_guarantee={} achieved={} rank={}",
                cert.t, cert.d_guarantee, cert.achieved, cert.rank
            ));
            r.line(format!(
                "redundancy {} >= {:.6}",
                code.redundancy(),
                bound.proven_minimum()
            ));
            r.set("result", json!("certified"));
            r.set("t", json!(cert.t));
            r.set("d_guarantee", json!(cert.d_guarantee));
            r.set("achieved", json!(cert.achieved));
            r.set("rank", json!(cert.rank));
            r.set("redundancy", json!(code.redundancy()));
            r.set("proven_minimum", json!(bound.proven_minimum()));
            Ok(r)
        }
        Command::CheckCert { code, cert } => {
            let mut r = Report::new("check-cert");
            let code = load_code(code, g.systematize, &mut r)?;
            let text = read_file(cert)?;
            let parsed = Certificate::from_json(&text)
                .map_err(|e| usage(format!("{}: {e}", cert.display())))?;
            match verify_certificate(&parsed, &code) {
                Ok(()) => {
                    r.line("VALID");
                    r.set("result", json!("valid"));
                }
                Err(f) => {
                    r.line(format!("INVALID {f}"));
                    r.set("result", json!("invalid"));
                    r.set("condition", json!(f.condition));
                    r.set("detail", json!(f.detail));
                    r.exit = EXIT_FALSE;
                }
            }
            Ok(r)
        }
        Command::Construct { family } => {
            let mut r = Report::new("construct");
            let (code, target) = match family {
                Family::Replication { n, m, target } => {
                    (replication(Field::new(target.q)?, *n, *m)?, target)
                }
                Family::SingleParity { n, target } => {
                    (single_parity(Field::new(target.q)?, *n)?, target)
                }
                Family::GridParity { s, target } => {
                    (grid_parity(Field::new(target.q)?, *s)?, target)
                }
                Family::Random { n, r: red, target } => (
                    random_systematic(Field::new(target.q)?, *n, *red, config.seed)?,
                    target,
                ),
            };
            write_file(&target.out, &code.to_text())?;
            r.line(format!(
                "wrote {} (q={} n={} N={})",
                target.out.display(),
                code.field().order(),
                code.dimension(),
                code.length()
            ));
            r.set("path", json!(target.out.display().to_string()));
            r.set("q", json!(code.field().order()));
            r.set("n", json!(code.dimension()));
            r.set("N", json!(code.length()));
            Ok(r)
        }
        Command::Bounds {
            grid_step,
            csv,
            svg,
        } => {
            let mut r = Report::new("bounds");
            bounds::emit_plot(*grid_step, csv, svg)?;
            r.line(format!("wrote {} and {}", csv.display(), svg.display()));
            r.set("csv", json!(csv.display().to_string()));
            r.set("svg", json!(svg.display().to_string()));
            Ok(r)
        }
        Command::Distance { code } => {
            let mut r = Report::new("distance");
            let code = load_code(code, g.systematize, &mut r)?;
            let d = code.min_distance(config.codeword_cap)?;
            r.line(d.to_string());
            r.set("distance", json!(d));
            Ok(r)
        }
    }
}

fn counterexample(r: &mut Report, req: &BatchRequest) {
    r.line(format!("COUNTEREXAMPLE {req}"));
    r.set("result", json!("counterexample"));
    r.set("witness", json!(one_based(req.indices())));
    r.exit = EXIT_FALSE;
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
        .into()
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
        .into()
    })
}

/// Reads a code file, optionally systematizing it. A systematized code
/// reports `PERMUTATION p_1 .. p_N`: new column `j` is original column `p_j`.
fn load_code(path: &Path, systematize: bool, r: &mut Report) -> Result<LinearCode, Failure> {
    let text = read_file(path)?;
    let at = |e: Error| usage(format!("{}: {e}", path.display()));
    let generator = LinearCode::parse_generator(&text).map_err(at)?;
    if !systematize {
        return LinearCode::from_generator(generator).map_err(at);
    }
    let (code, perm) = LinearCode::systematize(&generator).map_err(at)?;
    r.line(format!("PERMUTATION {}", join(&one_based(&perm))));
    r.set("permutation", json!(one_based(&perm)));
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("batchlab").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--k", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
        let (code, _, err) = run_args(&["distance", "--code", "/nonexistent/x.code"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("error: i/o error"), "{err}");
    }

    #[test]
    fn config_defaults_match_library() {
        let cli =
            Cli::try_parse_from(["batchlab", "--threads", "1", "distance", "--code", "x"]).unwrap();
        let c = cli.global.config();
        assert_eq!(c, Config::sequential());
        assert!(
            Cli::try_parse_from(["batchlab", "--dual-cap", "0", "distance", "--code", "x"])
                .is_err()
        );
    }
}
