fn main() {
    std::process::exit(hqfnn_cli::run(std::env::args().collect()));
}
