//! `coupler`: seeded batch commands over the coupler toolkit.
//!
//! Every command writes one primary output (format from the extension of
//! `--out`) plus a `<out>.report.json` run report echoing the resolved
//! configuration. Without `--out` the JSON payload goes to stdout.

mod args;
mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use coupler_core::Exec;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use args::{Cli, Command, Common};
use commands::Ctx;
use output::{pretty, report_path, round_json, write_atomic, Output};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files (exit 2).
    Usage(String),
    /// I/O or runtime failure (exit 1).
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<coupler_core::Error> for CliError {
    fn from(e: coupler_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

trait HasCommon {
    fn common(&self) -> &Common;
}

macro_rules! has_common {
    ($($t:ty),*) => {
        $(impl HasCommon for $t {
            fn common(&self) -> &Common {
                &self.common
            }
        })*
    };
}

has_common!(
    args::GadgetCmd,
    args::CircuitCmd,
    args::ThreeBodyCmd,
    args::YieldCmd,
    args::CriticalCmd,
    args::LhzCompileCmd,
    args::LhzValidateCmd,
    args::AnnealCmd,
    args::SpectrumCmd
);

fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(o) => Value::Object(
            o.into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, strip_nulls(v)))
                .collect(),
        ),
        other => other,
    }
}

fn setup_threads(threads: Option<usize>) -> Result<Exec, CliError> {
    match threads {
        Some(0) => Err(CliError::Usage("threads: must be ≥ 1".into())),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(t) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Failed(format!("threads: {e}")))?;
            Ok(Exec::Parallel)
        }
        _ => Ok(Exec::default()),
    }
}

fn execute<T, F>(name: &'static str, flags: T, run: F) -> Result<bool, CliError>
where
    T: HasCommon + Serialize + DeserializeOwned,
    F: FnOnce(&mut T, &Ctx) -> Result<Output, CliError>,
{
    let file = match &flags.common().config {
        Some(path) => config::load(path, name)?,
        None => Default::default(),
    };
    let mut args: T = config::merge(file, &flags)?;
    let out = args.common().out.clone();
    if let Some(path) = &out {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !matches!(ext, "csv" | "json" | "txt") {
            return Err(CliError::Usage(format!(
                "out: cannot infer format from {}; use .csv, .json or .txt",
                path.display()
            )));
        }
    }
    let ctx = Ctx {
        exec: setup_threads(args.common().threads)?,
    };
    let start = Instant::now();
    let result = run(&mut args, &ctx)?;
    let duration = start.elapsed().as_secs_f64();
    let echo = strip_nulls(serde_json::to_value(&args).expect("config echo"));
    match &out {
        Some(path) => {
            let bytes = result.render_for(name, path)?;
            write_atomic(path, &bytes)?;
            let mut report = json!({
                "version": args::VERSION,
                "command": name,
                "config": echo,
                "passed": result.passed,
                "duration_seconds": duration,
                "output": path.display().to_string(),
                "payload": result.json,
            });
            round_json(&mut report);
            write_atomic(&report_path(path), &pretty(&report))?;
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&pretty(&result.json))
                .map_err(|e| CliError::Failed(format!("stdout: {e}")))?;
        }
    }
    Ok(result.passed)
}

fn dispatch(cmd: Command) -> Result<bool, CliError> {
    let name = cmd.name();
    match cmd {
        Command::GadgetVerify(a) => execute(name, a, commands::gadget_verify),
        Command::GadgetBuild(a) => execute(name, a, commands::gadget_build),
        Command::CircuitCouplings(a) => execute(name, a, commands::circuit_couplings),
        Command::ThreeBodyTolerance(a) => execute(name, a, commands::three_body_tolerance),
        Command::YieldSim(a) => execute(name, a, commands::yield_sim),
        Command::CriticalSigma(a) => execute(name, a, commands::critical_sigma),
        Command::Bound(a) => execute(name, a, commands::bound),
        Command::LhzCompile(a) => execute(name, a, commands::lhz_compile),
        Command::LhzValidate(a) => execute(name, a, commands::lhz_validate),
        Command::Anneal(a) => execute(name, a, commands::anneal),
        Command::Spectrum(a) => execute(name, a, commands::spectrum),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
