fn main() {
    std::process::exit(sphint::cli::run_cli(std::env::args_os()));
}
