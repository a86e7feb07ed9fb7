use clap::Parser;

fn main() {
    let cli = gradwin_cli::Cli::parse();
    std::process::exit(gradwin_cli::run(&cli));
}
