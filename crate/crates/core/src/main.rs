fn main() {
    std::process::exit(dgtwist::cli::run(std::env::args_os()));
}
