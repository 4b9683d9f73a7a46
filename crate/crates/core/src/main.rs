use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use nu_forge::language::DEFAULT_DELAY_CAP;
use nu_forge::pipeline::{run, FixedPointChoice, RunConfig};
use nu_forge::report::{render_json, render_text};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixedPointArg {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Interval morphisms and equidistributed sequences of binary morphisms.
#[derive(Debug, Parser)]
#[command(name = "nu-forge", version)]
struct Cli {
    /// Morphism such as "a->ab;b->ba".
    morphism: String,
    /// Number of sequence terms per fixed point.
    #[arg(long, default_value_t = 16)]
    terms: usize,
    #[arg(long, value_enum, default_value_t = FixedPointArg::Both)]
    fixed_point: FixedPointArg,
    /// Decimal digits of the approximations.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    digits: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest synchronization delay searched.
    #[arg(long, default_value_t = DEFAULT_DELAY_CAP)]
    delay_cap: usize,
    /// Run the brute-force oracle on the output.
    #[arg(long)]
    check: bool,
    /// Pass to the extended alphabet even when it is not needed.
    #[arg(long)]
    force_extend: bool,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let mut config = RunConfig::new(cli.morphism);
    config.terms = cli.terms;
    config.fixed_point = match cli.fixed_point {
        FixedPointArg::A => FixedPointChoice::A,
        FixedPointArg::B => FixedPointChoice::B,
        FixedPointArg::Both => FixedPointChoice::Both,
    };
    config.digits = cli.digits as usize;
    config.delay_cap = cli.delay_cap;
    config.check = cli.check;
    config.force_extend = cli.force_extend;
    config.verbose = cli.verbose;

    match run(&config) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => render_text(&out),
                Format::Json => render_json(&out) + "\n",
            };
            // A closed pipe downstream is not an error of ours.
            std::io::stdout().lock().write_all(body.as_bytes()).ok();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nu-forge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
