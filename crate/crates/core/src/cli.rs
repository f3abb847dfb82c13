//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 validation or check failure, 2 input error,
//! 3 solver nonconvergence.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::norm::{
    geometric_closed_form, global_norm, modular, window_norm_solution, DEFAULT_TOL,
};
use crate::output::to_json_string;
use crate::property::{reproduce_counterexample, run_suite, SuiteConfig, COUNTEREXAMPLE_TRUNCATION};
use crate::sequence::{geometric_example, FiniteSequence, Window};
use crate::weights::{validate_weight, WeightSpec};
use crate::young::{validate_s_young, SYoungSpec, SamplingPlan, YoungFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

const DEFAULT_N_MAX: u64 = 1001;

#[derive(Debug, Parser)]
#[command(name = "omseq", version, about = "Windowed Orlicz-Morrey quasi-norms of sequences")]
pub struct Cli {
    /// Weight spec: a JSON file or inline JSON (default: identity)
    #[arg(long = "phi", global = true, value_name = "SPEC")]
    pub phi: Option<String>,
    /// s-Young function spec: a JSON file or inline JSON
    #[arg(long = "Phi", global = true, value_name = "SPEC")]
    pub young: Option<String>,
    /// Overrides the exponent s of the Young spec
    #[arg(long = "s", global = true)]
    pub s: Option<f64>,
    /// Relative tolerance of the root solver
    #[arg(long = "tol", global = true)]
    pub tol: Option<f64>,
    /// Overrides the seed of a suite config
    #[arg(long = "seed", global = true)]
    pub seed: Option<u64>,
    /// Writes the document here instead of stdout
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global quasi-norm of a sequence
    Norm {
        /// Sequence: a JSON file or inline JSON
        sequence: String,
    },
    /// Norm on a single window
    WindowNorm {
        sequence: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Modular of a window at scale b
    Modular {
        sequence: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        b: f64,
    },
    /// Validates a Young spec (has "s") or a weight spec
    Validate {
        spec: String,
        /// Largest odd n sampled for a weight
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: u64,
    },
    /// Runs the property suite from a config
    Verify { config: String },
    /// Built-in examples: "geometric" or "counterexample"
    Example {
        name: String,
        #[arg(long = "D", default_value_t = 2.0)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Truncation |k| ≤ L
        #[arg(long = "L")]
        l: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long = "N")]
    pub n: u64,
}

/// Failure carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
            Error::Domain(_) | Error::Config(_) => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A document to emit and the status to exit with afterwards.
struct Emitted {
    doc: Value,
    code: i32,
}

fn emitted<T: Serialize>(doc: &T, code: i32) -> CliResult<Emitted> {
    let doc = serde_json::to_value(doc).map_err(|e| CliError::input(e.to_string()))?;
    Ok(Emitted { doc, code })
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a path.
fn load_json(arg: &str, what: &str) -> CliResult<Value> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| CliError::input(format!("cannot read {what} \"{arg}\": {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("malformed {what}: {e}")))
}

fn parse<T: DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::input(format!("invalid {what}: {e}")))
}

impl Cli {
    fn young(&self) -> CliResult<SYoungSpec> {
        let arg = self
            .young
            .as_deref()
            .ok_or_else(|| CliError::input("missing --Phi <young-spec>"))?;
        let mut v = load_json(arg, "Young spec")?;
        if let (Some(s), Value::Object(map)) = (self.s, &mut v) {
            map.insert("s".into(), json!(s));
        }
        let spec: SYoungSpec = parse(v, "Young spec")?;
        spec.check()?;
        Ok(spec)
    }

    fn weight(&self) -> CliResult<WeightSpec> {
        let Some(arg) = self.phi.as_deref() else {
            return Ok(WeightSpec::Identity);
        };
        let spec: WeightSpec = parse(load_json(arg, "weight spec")?, "weight spec")?;
        spec.check_params()?;
        Ok(spec)
    }

    fn tol(&self) -> CliResult<f64> {
        match self.tol {
            None => Ok(DEFAULT_TOL),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(CliError::input(format!("--tol must be positive, got {t}"))),
        }
    }
}

fn sequence(arg: &str) -> CliResult<FiniteSequence> {
    let x: FiniteSequence = parse(load_json(arg, "sequence")?, "sequence")?;
    if let Some(v) = x.values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::input(format!("sequence entries must be finite, got {v}")));
    }
    Ok(x)
}

fn execute(cli: &Cli) -> CliResult<Emitted> {
    match &cli.command {
        Command::Norm { sequence: seq } => {
            let x = sequence(seq)?;
            let r = global_norm(&x, &cli.young()?, &cli.weight()?, cli.tol()?)?;
            emitted(&r, EXIT_OK)
        }
        Command::WindowNorm { sequence: seq, window } => {
            let x = sequence(seq)?;
            let w = Window::new(window.m, window.n);
            let r = window_norm_solution(&x, &w, &cli.young()?, &cli.weight()?, cli.tol()?)?;
            emitted(
                &json!({ "window_norm": r.value, "window": w, "iterations": r.iterations }),
                EXIT_OK,
            )
        }
        Command::Modular { sequence: seq, window, b } => {
            let x = sequence(seq)?;
            let w = Window::new(window.m, window.n);
            let v = modular(&x, &w, *b, &cli.young()?, &cli.weight()?)?;
            emitted(&json!({ "modular": v, "window": w, "b": b }), EXIT_OK)
        }
        Command::Validate { spec, n_max } => validate(spec, *n_max),
        Command::Verify { config } => {
            let mut cfg: SuiteConfig = parse(load_json(config, "suite config")?, "suite config")?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let report = run_suite(&cfg)?;
            let code = if report.passed { EXIT_OK } else { EXIT_FAILED };
            emitted(&report, code)
        }
        Command::Example { name, d, p, l } => example(name, *d, *p, *l, cli.tol()?),
    }
}

fn validate(spec: &str, n_max: u64) -> CliResult<Emitted> {
    let v = load_json(spec, "spec")?;
    let is_young = v.get("s").is_some();
    let report = if is_young {
        let f: SYoungSpec = parse(v, "Young spec")?;
        validate_s_young(&f, &SamplingPlan::default())
    } else {
        let w: WeightSpec = parse(v, "weight spec")?;
        validate_weight(&w, n_max)?
    };
    let code = if report.valid { EXIT_OK } else { EXIT_FAILED };
    emitted(&report, code)
}

fn example(name: &str, d: f64, p: f64, l: Option<u64>, tol: f64) -> CliResult<Emitted> {
    match name {
        "geometric" => {
            let l = l.unwrap_or(64);
            let young = SYoungSpec::new(YoungFamily::Power { p }, p.min(1.0))?;
            let x = geometric_example(d, p, l)?;
            let r = global_norm(&x, &young, &WeightSpec::Identity, tol)?;
            let closed = geometric_closed_form(d, p)?;
            emitted(
                &json!({
                    "D": d,
                    "p": p,
                    "s": young.s,
                    "L": l,
                    "truncated_norm": r.value,
                    "witness": r.witness,
                    "closed_form": closed,
                    "difference": (r.value - closed).abs(),
                }),
                EXIT_OK,
            )
        }
        "counterexample" => {
            let cmp = reproduce_counterexample(l.unwrap_or(COUNTEREXAMPLE_TRUNCATION))?;
            emitted(&cmp, EXIT_OK)
        }
        other => Err(CliError::input(format!(
            "unknown example \"{other}\" (expected geometric or counterexample)"
        ))),
    }
}

fn emit(cli: &Cli, doc: &Value) -> CliResult<()> {
    let text = to_json_string(doc).map_err(|e| CliError::input(e.to_string()))?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = execute(&cli).and_then(|out| emit(&cli, &out.doc).map(|_| out.code));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "omseq", "--Phi", "{\"family\":\"power\",\"p\":1,\"s\":1}", "window-norm", "x.json",
            "--m", "-3", "--N", "2",
        ])
        .unwrap();
        match cli.command {
            Command::WindowNorm { window, .. } => assert_eq!((window.m, window.n), (-3, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn s_override_is_checked() {
        let cli = Cli::try_parse_from([
            "omseq", "--Phi", "{\"family\":\"power\",\"p\":1,\"s\":1}", "--s", "1.5", "norm", "[]",
        ])
        .unwrap();
        let err = cli.young().unwrap_err();
        assert_eq!(err.code, EXIT_INPUT);
        assert!(err.message.contains("s out of (0,1]"), "{}", err.message);
    }

    #[test]
    fn error_kinds_map_to_statuses() {
        assert_eq!(CliError::from(Error::NonConvergence("x".into())).code, 3);
        assert_eq!(CliError::from(Error::Domain("x".into())).code, 2);
        assert_eq!(CliError::from(Error::Config("x".into())).code, 2);
    }

    #[test]
    fn bad_tolerance_is_an_input_error() {
        let cli = Cli::try_parse_from(["omseq", "--tol=-1", "example", "geometric"]).unwrap();
        assert_eq!(cli.tol().unwrap_err().code, EXIT_INPUT);
    }
}
