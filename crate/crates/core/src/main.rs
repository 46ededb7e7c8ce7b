fn main() {
    std::process::exit(graphlab::cli::run(std::env::args_os()));
}
