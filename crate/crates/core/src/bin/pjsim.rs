fn main() {
    std::process::exit(precise_jamming::cli::main_with_args(std::env::args_os()));
}
