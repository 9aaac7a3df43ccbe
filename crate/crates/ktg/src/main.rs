fn main() {
    std::process::exit(ktg::cli::main_with_args(std::env::args_os()));
}
