fn main() {
    std::process::exit(izhifit::cli::run_from(std::env::args_os()));
}
