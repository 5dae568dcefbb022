use std::io;
use std::process::ExitCode;

use clap::Parser;
use crscl_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli, &mut io::stdout().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("crscl: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
