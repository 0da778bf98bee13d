use clap::Parser;
use sigma_hunt::cli::{run, Cli};

fn main() {
    // Argument errors exit 2 via clap; --help and --version exit 0.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
