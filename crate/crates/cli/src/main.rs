use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geowalk::experiment::{builtin, builtin_names, map_eval, run_scenario, write_outputs, Scenario};
use geowalk::Error;

#[derive(Parser)]
#[command(
    name = "geowalk",
    version,
    about = "Grid-graph approximation of quasihyperbolic and hyperbolic geodesics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a builtin scenario by name.
    Run {
        scenario: String,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the scenario JSON instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// List the builtin scenarios.
    ListBuiltins,
    /// Print quadrilateral-map vertices and samples as CSV.
    MapEval { params: PathBuf },
}

const CONFIG: u8 = 2;
const NO_PATH: u8 = 3;
const NUMERIC: u8 = 4;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        Error::NoPath { .. } => NO_PATH,
        e if e.is_numeric() => NUMERIC,
        _ => CONFIG,
    };
    ExitCode::from(code)
}

fn load(arg: &str) -> Result<Scenario, Error> {
    let path = std::path::Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return Scenario::from_json(&text);
    }
    builtin(arg).ok_or_else(|| Error::Scenario {
        pointer: String::new(),
        reason: format!("`{arg}` is neither a file nor a builtin scenario (see list-builtins)"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListBuiltins => {
            for name in builtin_names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::MapEval { params } => {
            let text = match std::fs::read_to_string(&params) {
                Ok(t) => t,
                Err(e) => return fail(&Error::Io(e)),
            };
            match map_eval(&text) {
                Ok(csv) => {
                    print!("{csv}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Run { scenario, out, print } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            if print {
                println!("{}", s.to_json());
                return ExitCode::SUCCESS;
            }
            let report = match run_scenario(&s) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            if let Err(e) = write_outputs(&report, &s, &dir) {
                return fail(&e);
            }
            for q in &report.queries {
                match (&q.length, &q.error) {
                    (Some(l), _) => println!("{}\t{}\t{l:.6}", q.name, q.metric),
                    (None, Some(e)) => println!("{}\t{}\terror: {e}", q.name, q.metric),
                    _ => {}
                }
            }
            for a in &report.analyses {
                let vals: Vec<String> = a.values.iter().map(|v| format!("{}={:.6}", v.key, v.value)).collect();
                let err = a.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
                println!("{}[{}]\t{}{err}", a.kind, a.queries.join(","), vals.join(" "));
            }
            eprintln!("wrote {} in {:.2} s", dir.display(), report.wall_seconds);
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
