fn main() {
    std::process::exit(hawkes_smc::cli::run_cli(std::env::args_os()));
}
