use clap::Parser;
use nimseq::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("nimseq: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
