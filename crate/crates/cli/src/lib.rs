//! Command-line front end for `dfsim`.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command};
use error::CliResult;
use output::print_json;

/// Runs one subcommand. File-writing commands report their paths on stdout;
/// the others print a JSON document.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Evolve(a) => {
            let w = commands::cmd_evolve(a)?;
            println!("wrote {}", w.csv.display());
            println!("wrote {}", w.json.display());
        }
        Command::Sweep(a) => {
            let w = commands::cmd_sweep(a)?;
            println!("wrote {}", w.csv.display());
            println!("wrote {}", w.json.display());
        }
        Command::Dfs(a) => print_json(&commands::cmd_dfs(a)?)?,
        Command::Steady(a) => print_json(&commands::cmd_steady(a)?)?,
        Command::Rates(a) => print_json(&commands::cmd_rates(a)?)?,
        Command::CheckCouplings(a) => print_json(&commands::cmd_check_couplings(a)?)?,
    }
    Ok(())
}
