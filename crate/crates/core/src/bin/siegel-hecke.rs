use clap::Parser;

fn main() {
    let cli = siegel_hecke::cli::Cli::parse();
    std::process::exit(siegel_hecke::cli::run(cli));
}
