fn main() {
    std::process::exit(texfair::cli::main_with_args(std::env::args_os()));
}
