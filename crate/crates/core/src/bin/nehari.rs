fn main() {
    std::process::exit(nehari::cli::main_with_args(std::env::args_os()));
}
