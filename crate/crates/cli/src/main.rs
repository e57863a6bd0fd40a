use clap::Parser;

use nesy_verify_cli::args::Cli;
use nesy_verify_cli::commands::run;

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = run(cli, &mut out) {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
