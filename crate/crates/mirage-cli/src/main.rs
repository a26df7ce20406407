use clap::Parser;

use mirage_cli::app::{run, Args};

fn main() {
    let args = Args::parse();
    if let Err(e) = run(args) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
