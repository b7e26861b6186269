fn main() {
    std::process::exit(eigenpath_cli::run(std::env::args_os()));
}
