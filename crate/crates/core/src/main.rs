fn main() {
    std::process::exit(sc_forge::cli::run(std::env::args_os()));
}
