fn main() {
    std::process::exit(cacheveil::cli::run(std::env::args_os()));
}
