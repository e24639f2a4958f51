fn main() {
    std::process::exit(typealign::cli::main_with_args(std::env::args_os()));
}
