use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use roamsim_cli::commands::{
    cmd_compare, cmd_graph, cmd_run, cmd_sweep, parse_mns_list, GraphChoice, Overrides,
};
use roamsim_cli::scenario::parse_scheme_flag;
use roamsim_cli::CliError;

/// Deterministic simulator of context-caching schemes for 802.11 handoffs.
#[derive(Parser)]
#[command(name = "roamsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write events, messages, metrics, and a summary.
    Run {
        /// Scenario file (JSON).
        #[arg(long)]
        scenario: PathBuf,
        /// Scheme override: reactive | pnc | snc:<threshold> | nacs[:mode].
        #[arg(long)]
        scheme: Option<String>,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Mobile-node count override.
        #[arg(long)]
        mns: Option<u32>,
        /// Duration override, simulated seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Record one mobility trace and replay it under several schemes.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Schemes to replay, e.g. `pnc nacs:intersection snc:0.15`.
        #[arg(required = true, num_args = 1..)]
        schemes: Vec<String>,
        /// Node counts to sweep, e.g. `5,10,20,40`.
        #[arg(long)]
        mns: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Dump a graph as a sorted edge list.
    Graph {
        #[arg(long)]
        scenario: PathBuf,
        /// Which graph: neighbor | overlap | nong.
        which: String,
        /// Events CSV from a prior run (needed for the neighbor graph and
        /// the intersection-mode NONG).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the scenario once per node count.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Node counts, e.g. `5,10,20,40`.
        #[arg(long)]
        mns: String,
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let command_line: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match dispatch(cli, &command_line.join(" ")) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli, command_line: &str) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scenario,
            scheme,
            seed,
            mns,
            duration,
            out,
        } => {
            let overrides = Overrides {
                scheme: scheme.as_deref().map(parse_scheme_flag).transpose()?,
                seed,
                mns,
                duration_s: duration,
            };
            let result = cmd_run(&scenario, &overrides, &out, command_line)?;
            println!(
                "run complete: {} events, {} messages, chp {}",
                result.trace.events.len(),
                result.message_log.len(),
                roamsim_cli::output::fmt_f64(result.summary.chp)
            );
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Compare {
            scenario,
            schemes,
            mns,
            seed,
            duration,
            out,
        } => {
            let schemes = schemes
                .iter()
                .map(|s| parse_scheme_flag(s))
                .collect::<Result<Vec<_>, _>>()?;
            let mns_list = mns.as_deref().map(parse_mns_list).transpose()?;
            let overrides = Overrides {
                scheme: None,
                seed,
                mns: None,
                duration_s: duration,
            };
            let results = cmd_compare(&scenario, &schemes, mns_list.as_deref(), &overrides, &out)?;
            for r in &results {
                println!(
                    "{} mns={}: {}",
                    r.scheme,
                    r.trace.n_mobile_nodes,
                    roamsim_cli::output::summary_of(&r.summary)
                );
            }
            println!("wrote {}", out.join("compare.csv").display());
            Ok(())
        }
        Command::Graph {
            scenario,
            which,
            trace,
            out,
        } => {
            let choice = GraphChoice::parse(&which)?;
            let overrides = Overrides::default();
            let path = cmd_graph(&scenario, choice, trace.as_deref(), &overrides, &out)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Sweep {
            scenario,
            mns,
            scheme,
            seed,
            duration,
            out,
        } => {
            let overrides = Overrides {
                scheme: scheme.as_deref().map(parse_scheme_flag).transpose()?,
                seed,
                mns: None,
                duration_s: duration,
            };
            let counts = parse_mns_list(&mns)?;
            let results = cmd_sweep(&scenario, &counts, &overrides, &out)?;
            for r in &results {
                println!(
                    "mns={}: {}",
                    r.trace.n_mobile_nodes,
                    roamsim_cli::output::summary_of(&r.summary)
                );
            }
            println!("wrote {}", out.join("sweep.csv").display());
            Ok(())
        }
    }
}
