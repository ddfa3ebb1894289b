//! `plate-tone`: fundamental tones of free plates from the command line.
//!
//! Exit status is 0 when every invariant checked by the run holds, 1 when one
//! fails and 2 when the configuration is rejected. Errors are reported as JSON
//! on stderr.

mod config;
mod output;
mod plot;
mod run;

use clap::{Parser, Subcommand};
use config::{CommandKind, Overrides, RunConfig};
use plate_tone::SCHEMA;
use run::Failure;
use serde_json::json;
use std::process::ExitCode;

const THREADS_VAR: &str = "PLATE_TONE_THREADS";

#[derive(Parser)]
#[command(name = "plate-tone", version, about = "Fundamental tones of free and Steklov biharmonic plates")]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Closed-form parameters and tone of the unit ball.
    BallTone,
    /// The eight monotonicity properties of the radial profile.
    Properties,
    /// Both sides of the quantitative inequality for one or more domains.
    Bound,
    /// Fraenkel asymmetry of a domain.
    Asymmetry,
    /// Tone gap sweep over eps with a log-log slope fit.
    Sharpness,
}

impl From<Cmd> for CommandKind {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::BallTone => Self::BallTone,
            Cmd::Properties => Self::Properties,
            Cmd::Bound => Self::Bound,
            Cmd::Asymmetry => Self::Asymmetry,
            Cmd::Sharpness => Self::Sharpness,
        }
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "schema": SCHEMA, "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or(format!("{THREADS_VAR} = {v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("config", e.to_string().trim(), 2),
    };
    if let Err(m) = configure_threads() {
        return fail("config", &m, 2);
    }
    let o = &cli.overrides;
    let base = match &o.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(m) => return fail("config", &m, 2),
        },
        None => RunConfig::default(),
    };
    let cfg = match base.resolve(cli.command.map(Into::into), o) {
        Ok(c) => c,
        Err(m) => return fail("config", &m, 2),
    };
    if o.dump_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("serializable"));
        return ExitCode::SUCCESS;
    }

    let outcome = match run::execute(&cfg) {
        Ok(r) => r,
        Err(Failure::Config(m)) => return fail("config", &m, 2),
        Err(Failure::Numerical(m)) => return fail("numerical", &m, 1),
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("serializable") + "\n";
    if let Some(dir) = &cfg.out {
        let command = cfg.command.expect("resolved").name();
        let json_name = format!("{command}.json");
        let files = std::iter::once((json_name.as_str(), text.as_str()))
            .chain(outcome.files.iter().map(|(n, c)| (n.as_str(), c.as_str())));
        for (name, contents) in files {
            if let Err(e) = output::write_atomic(dir, name, contents) {
                return fail("io", &format!("{}: {e}", dir.join(name).display()), 2);
            }
        }
    }
    print!("{text}");
    if outcome.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        fail("assertion", &outcome.violations.join("; "), 1)
    }
}
