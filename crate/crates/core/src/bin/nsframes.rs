fn main() {
    std::process::exit(nsframes::cli::main_with_args(std::env::args_os()));
}
