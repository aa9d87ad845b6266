fn main() {
    std::process::exit(qpt_sensing::cli::run_from_args(std::env::args_os()));
}
