fn main() {
    std::process::exit(divest::cli::main_with_args(std::env::args_os()));
}
