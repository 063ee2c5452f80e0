fn main() {
    std::process::exit(delay_repair::cli::run_from(std::env::args_os()));
}
