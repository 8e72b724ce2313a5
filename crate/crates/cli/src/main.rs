fn main() {
    std::process::exit(rhc_cli::run(std::env::args_os()));
}
