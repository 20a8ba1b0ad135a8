fn main() {
    std::process::exit(scabbard::cli::run(std::env::args_os()));
}
