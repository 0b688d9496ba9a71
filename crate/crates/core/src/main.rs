fn main() {
    std::process::exit(chiralchain::cli::main_with(std::env::args_os()));
}
