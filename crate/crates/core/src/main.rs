use clap::Parser;

fn main() {
    let cli = patseq::cli::Cli::parse();
    std::process::exit(patseq::cli::run(&cli));
}
