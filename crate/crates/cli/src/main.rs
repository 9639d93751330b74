use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use energy_gdp_cli::commands::exit;
use energy_gdp_cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(exit::DATA as u8);
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| run(&config));
    match result {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
