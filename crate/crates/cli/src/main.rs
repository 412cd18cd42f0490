fn main() {
    std::process::exit(sphercool_cli::run(std::env::args_os()));
}
