fn main() {
    std::process::exit(sclera_qc::cli::run_cli(std::env::args_os()));
}
