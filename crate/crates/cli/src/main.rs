use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use ncball::acceptance::{self, Context, SUITES};
use ncball::caratheodory::{check_feasibility, extend, verify_solution, CaratheodoryProblem, ExtendOptions};
use ncball::cmatrix::{self, json::to_rows};
use ncball::fock::{self, FockTrunc, OperatorTuple};
use ncball::freeword::GradedBasis;
use ncball::pluriharmonic::{self, PluriharmonicFn};
use ncball::series::{self, Direction, FreeSeries};
use ncball::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "ncball", version, about = "Free holomorphic functions on the noncommutative ball: Caratheodory interpolation and friends")]
struct Cli {
    /// Numerical tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Iteration budget for the extension solver
    #[arg(long, global = true, default_value_t = 5000)]
    max_iter: usize,

    /// Degree M of the extension
    #[arg(long, global = true)]
    target_degree: Option<usize>,

    /// Truncation degree (series cutoff, compression degree or Fock depth)
    #[arg(long, global = true)]
    trunc: Option<usize>,

    /// Seed for randomized verification and the self-test
    #[arg(long, global = true, default_value_t = acceptance::DEFAULT_SEED)]
    seed: u64,

    /// Write the JSON result here (atomically) instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the graded basis of words of length <= deg
    Basis { n: usize, deg: usize },
    /// Feasibility of a Caratheodory problem
    Check { problem: PathBuf },
    /// Extend a feasible Caratheodory problem to --target-degree
    Extend { problem: PathBuf },
    /// Formal Cayley transform of a series
    Cayley {
        #[arg(value_parser = parse_direction)]
        direction: Direction,
        series: PathBuf,
    },
    /// Evaluate a series at an operator tuple
    Eval { series: PathBuf, tuple: PathBuf },
    /// Lower bound for the sup norm, ||f(S^(m))|| with m = --trunc
    Norm { series: PathBuf },
    /// Poisson transform of a pluriharmonic symbol at a tuple, Fock depth --trunc
    Poisson { symbol: PathBuf, tuple: PathBuf },
    /// Run the acceptance suites
    Selftest {
        /// Print suite names without running them
        #[arg(long)]
        list: bool,
        /// Corrupt one ingredient; the run must then fail
        #[arg(long)]
        canary: bool,
    },
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Writes every float with 17 significant digits.
struct RoundTrip;

impl serde_json::ser::Formatter for RoundTrip {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTrip);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::Json(e))
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        e if e.is_input_error() => EXIT_INPUT,
        _ => EXIT_NUMERICAL,
    }
}

struct Run {
    cli: Cli,
}

impl Run {
    fn envelope(&self, command: &str, status: &str, result: Value) -> Value {
        json!({
            "tool": "ncball",
            "version": VERSION,
            "command": command,
            "status": status,
            "seed": self.cli.seed,
            "tol": self.cli.tol,
            "max_iter": self.cli.max_iter,
            "result": result,
        })
    }

    fn emit(&self, value: &Value) -> Result<(), Failure> {
        let bytes = to_json_bytes(value)?;
        match &self.cli.output {
            Some(path) => write_atomic(path, &bytes)?,
            None => io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }

    fn trunc(&self, what: &str) -> Result<usize, Failure> {
        self.cli.trunc.ok_or_else(|| Failure::Lib(Error::Input(format!("--trunc is required for {what}"))))
    }

    fn execute(&self) -> Result<u8, Failure> {
        if !(self.cli.tol > 0.0) {
            return Err(Error::Input("--tol must be positive".into()).into());
        }
        match &self.cli.command {
            Command::Basis { n, deg } => self.basis(*n, *deg),
            Command::Check { problem } => self.check(problem),
            Command::Extend { problem } => self.extend(problem),
            Command::Cayley { direction, series } => self.cayley(*direction, series),
            Command::Eval { series, tuple } => self.eval(series, tuple),
            Command::Norm { series } => self.norm(series),
            Command::Poisson { symbol, tuple } => self.poisson(symbol, tuple),
            Command::Selftest { list, canary } => Ok(self.selftest(*list, *canary)),
        }
    }

    fn basis(&self, n: usize, deg: usize) -> Result<u8, Failure> {
        let basis = GradedBasis::enumerate(n, deg)?;
        let words: Vec<String> = basis.words().iter().map(|w| w.to_string()).collect();
        self.emit(&self.envelope("basis", "ok", json!({ "n": n, "deg": deg, "dimension": words.len(), "words": words })))?;
        Ok(0)
    }

    fn check(&self, path: &Path) -> Result<u8, Failure> {
        let prob: CaratheodoryProblem = load(path)?;
        let rep = check_feasibility(&prob, self.cli.tol)?;
        let (status, code) = if rep.feasible { ("feasible", 0) } else { ("infeasible", EXIT_INFEASIBLE) };
        self.emit(&self.envelope("check", status, serde_json::to_value(&rep)?))?;
        Ok(code)
    }

    fn extend(&self, path: &Path) -> Result<u8, Failure> {
        let prob: CaratheodoryProblem = load(path)?;
        let target = self.cli.target_degree.unwrap_or(prob.m() + 2);
        let opts = ExtendOptions { tol: self.cli.tol, max_iter: self.cli.max_iter, slack: None };
        match extend(&prob, target, &opts) {
            Ok(ext) => {
                let verification = verify_solution(&prob, &ext, 20, self.cli.seed, self.cli.tol.max(1e-8))?;
                let result = json!({ "extension": ext, "verification": verification });
                self.emit(&self.envelope("extend", "ok", result))?;
                Ok(0)
            }
            Err(Error::Infeasible(min_eig)) => {
                self.emit(&self.envelope("extend", "infeasible", json!({ "min_eig": min_eig })))?;
                Ok(EXIT_INFEASIBLE)
            }
            Err(Error::NoConvergence { iterations, residual }) => {
                let result = json!({ "iterations": iterations, "residual": residual });
                self.emit(&self.envelope("extend", "no-convergence", result))?;
                Ok(EXIT_NO_CONVERGENCE)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn cayley(&self, direction: Direction, path: &Path) -> Result<u8, Failure> {
        let mut f: FreeSeries = load(path)?;
        if let Some(cutoff) = self.cli.trunc {
            f = f.truncate(cutoff);
        }
        let out = f.cayley(direction)?;
        self.emit(&self.envelope("cayley", "ok", serde_json::to_value(&out)?))?;
        Ok(0)
    }

    fn eval(&self, series_path: &Path, tuple_path: &Path) -> Result<u8, Failure> {
        let f: FreeSeries = load(series_path)?;
        let x: OperatorTuple = load(tuple_path)?;
        let e = series::eval_at(&f, &x)?;
        let result = json!({
            "value": to_rows(&e.value),
            "tail_estimate": e.tail_estimate,
            "jsr": e.jsr,
        });
        self.emit(&self.envelope("eval", "ok", result))?;
        Ok(0)
    }

    fn norm(&self, path: &Path) -> Result<u8, Failure> {
        let f: FreeSeries = load(path)?;
        let m = self.trunc("norm")?;
        let norm = series::hinf_norm_lower(&f, m)?;
        self.emit(&self.envelope("norm", "ok", json!({ "m": m, "norm_lower_bound": norm })))?;
        Ok(0)
    }

    fn poisson(&self, symbol_path: &Path, tuple_path: &Path) -> Result<u8, Failure> {
        let h: PluriharmonicFn = load(symbol_path)?;
        let x: OperatorTuple = load(tuple_path)?;
        let depth = self.trunc("poisson")?;
        let ft = FockTrunc::new(h.n(), depth)?;
        let jsr = series::jsr_estimate(&x, x.dim().max(1));
        match jsr.nilpotent_order {
            Some(nu) if depth >= nu + h.cutoff() => {}
            _ => {
                return Err(Error::ExactnessZone(format!(
                    "Fock depth {depth} needs a nilpotent tuple of order <= {}",
                    depth.saturating_sub(h.cutoff())
                ))
                .into())
            }
        }
        let boundary = pluriharmonic::radial_boundary(&h, 1.0, depth)?;
        let value = fock::poisson_transform(&ft, &boundary, &x)?;
        let direct = pluriharmonic::eval(&h, &x)?.value;
        let discrepancy = cmatrix::operator_norm(&(&value - &direct));
        let result = json!({
            "trunc": depth,
            "value": to_rows(&value),
            "direct": to_rows(&direct),
            "discrepancy": discrepancy,
        });
        self.emit(&self.envelope("poisson", "ok", result))?;
        Ok(0)
    }

    fn selftest(&self, list: bool, canary: bool) -> u8 {
        if list {
            for s in SUITES {
                println!("{:02} {}", s.id, s.name);
            }
            return 0;
        }
        let ctx = Context { seed: self.cli.seed, canary };
        println!("ncball {VERSION} selftest, seed {}", ctx.seed);
        let mut failed = 0;
        for suite in SUITES {
            let outcome = acceptance::run_suite(suite, &ctx);
            failed += usize::from(!outcome.passed);
            println!("{outcome}");
        }
        println!("{} passed, {failed} failed", SUITES.len() - failed);
        u8::from(failed > 0)
    }
}

/// Reads a JSON file, unwrapping the `result` of a previous `ncball` invocation.
fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Lib(Error::Input(format!("cannot read {}: {e}", path.display()))))?;
    let mut value: Value = serde_json::from_str(&text)?;
    if value.get("tool").and_then(Value::as_str) == Some("ncball") {
        value = value.get_mut("result").map(Value::take).unwrap_or(Value::Null);
    }
    Ok(serde_json::from_value(value)?)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = Run { cli };
    match run.execute() {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
