fn main() {
    std::process::exit(graphfield::cli::run(std::env::args_os()));
}
