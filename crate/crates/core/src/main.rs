use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use berkspec::cli::{apply_overrides, exit_code, run, Command, Format, Overrides, DEFAULT_SEED};
use berkspec::problem::parse_problem;

/// Exact spectra and radii of convergence of p-adic differential modules.
#[derive(Parser, Debug)]
#[command(name = "berkspec", version)]
struct Args {
    /// Problem file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    command: Command,
    /// Point as "center,t" with radius p^-t.
    #[arg(long)]
    point: Option<String>,
    /// Constant a for nabla - a.
    #[arg(long)]
    twist: Option<String>,
    /// Tube size as a power of p, e.g. "1/5".
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    lmax: Option<u32>,
    #[arg(long)]
    steps: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the sampled center check.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input.display());
            return ExitCode::from(1);
        }
    };
    let ov = Overrides {
        point: args.point,
        twist: args.twist,
        epsilon: args.epsilon,
        lmax: args.lmax,
        steps: args.steps,
        seed: args.seed,
    };
    let result = parse_problem(&text).and_then(|mut pf| {
        apply_overrides(&mut pf, &ov)?;
        run(args.command, &pf, ov.seed.unwrap_or(DEFAULT_SEED))
    });
    let code = exit_code(&result);
    match result.and_then(|r| r.render(args.format)) {
        Ok(out) => {
            let written = match &args.out {
                Some(path) => std::fs::write(path, out),
                None => {
                    print!("{out}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(code.max(1) as u8);
        }
    }
    ExitCode::from(code as u8)
}
