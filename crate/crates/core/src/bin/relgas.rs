fn main() {
    std::process::exit(relgas::cli::run_cli(std::env::args_os()));
}
