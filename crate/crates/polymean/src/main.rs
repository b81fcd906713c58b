fn main() {
    std::process::exit(polymean::cli::main_with(std::env::args_os()));
}
