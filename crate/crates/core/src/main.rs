fn main() {
    std::process::exit(spcd::cli::run(std::env::args_os()));
}
