fn main() {
    std::process::exit(kac_core::cli::main_with(std::env::args_os()));
}
