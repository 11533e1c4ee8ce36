use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decor::dsl::{emit_report, execute, parse_script, Config, Format, Mode};

#[derive(Parser)]
#[command(name = "decor", version, about = "Check decorated proofs, laws and translations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lemmas, proofs, equation checks and proof searches.
    Check(Opts),
    /// Law suites and equation checks.
    Verify(Opts),
    /// Term evaluations.
    Eval(Opts),
    /// Print every theory with its decorations forgotten.
    Erase(Opts),
    /// Print every theory with the effect made explicit.
    Expand(Opts),
    /// Print the dual of every theory.
    Dualize(Opts),
    /// Every command of the script, in order.
    Run(Opts),
}

#[derive(Args)]
struct Opts {
    script: PathBuf,
    /// Carrier size for an index or a named type, e.g. `x=3` or `Y=2`.
    #[arg(long = "model", value_name = "K=V", value_parser = parse_size)]
    model: Vec<(String, u32)>,
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Saturation rounds for `prove` commands without their own budget.
    #[arg(long, default_value_t = 4)]
    budget: usize,
    /// Stop at the first command that does not succeed.
    #[arg(long)]
    fail_fast: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

fn parse_size(s: &str) -> Result<(String, u32), String> {
    let (k, v) = s.split_once('=').ok_or("expected K=V")?;
    let v = v.parse().map_err(|_| format!("`{v}` is not a size"))?;
    Ok((k.to_string(), v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, opts) = match cli.command {
        Cmd::Check(o) => (Mode::Check, o),
        Cmd::Verify(o) => (Mode::Verify, o),
        Cmd::Eval(o) => (Mode::Eval, o),
        Cmd::Erase(o) => (Mode::Erase, o),
        Cmd::Expand(o) => (Mode::Expand, o),
        Cmd::Dualize(o) => (Mode::Dualize, o),
        Cmd::Run(o) => (Mode::All, o),
    };
    let src = match std::fs::read_to_string(&opts.script) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("decor: {}: {e}", opts.script.display());
            return ExitCode::from(2);
        }
    };
    let script = match parse_script(&src) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}:{e}", opts.script.display());
            return ExitCode::from(2);
        }
    };
    let config = Config {
        mode,
        budget: opts.budget,
        fail_fast: opts.fail_fast,
        overrides: opts.model,
    };
    let report = execute(&script, &config);
    let format = match opts.format {
        OutFormat::Text => Format::Text,
        OutFormat::Json => Format::Json,
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(&emit_report(&report, format)).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
