fn main() {
    std::process::exit(jumpforge::cli::main_with_args(std::env::args_os()));
}
