use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use witnesslab_cli::app::{run, Cli};

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let code = match run(cli, &mut lock) {
                Ok(code) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            };
            let _ = lock.flush();
            code
        }
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            }
        }
    };
    std::process::exit(code);
}
