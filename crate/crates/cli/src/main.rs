use clap::Parser;

use ringsplit_cli::{run, Cli, SEED_ENV};

fn main() {
    let cli = Cli::parse();
    let code = run(cli, std::env::var(SEED_ENV).ok(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
