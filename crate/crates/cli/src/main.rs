fn main() {
    std::process::exit(normprod_cli::run(std::env::args_os()));
}
