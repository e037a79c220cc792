fn main() {
    std::process::exit(tggflow::cli::run_cli(std::env::args_os()));
}
