use clap::Parser;

fn main() {
    let cli = gesforge::cli::Cli::parse();
    std::process::exit(gesforge::cli::run(cli));
}
