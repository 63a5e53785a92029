use clap::Parser;

fn main() {
    let cli = dpw_cmc_cli::Cli::parse();
    if let Err(e) = dpw_cmc_cli::run(&cli) {
        if !matches!(e, dpw_cmc_cli::CliError::VerifyFailed) {
            eprintln!("error: {e}");
        }
        std::process::exit(e.exit_code());
    }
}
