fn main() {
    std::process::exit(radmoser::cli::main_with_args(std::env::args_os()));
}
