fn main() {
    std::process::exit(fuzzysim::cli::run(std::env::args_os()));
}
