fn main() {
    std::process::exit(specband::cli::run(std::env::args_os()));
}
