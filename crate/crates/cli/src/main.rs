fn main() {
    std::process::exit(diagmp_cli::app::main_with_args(std::env::args_os()));
}
