use clap::Parser;

fn main() {
    let cfg = ridgenet_cli::JobConfig::parse();
    std::process::exit(ridgenet_cli::run(&cfg));
}
