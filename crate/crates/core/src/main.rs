fn main() {
    std::process::exit(screenqkd::cli::run_cli(std::env::args_os()));
}
