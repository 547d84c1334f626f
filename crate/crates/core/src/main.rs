fn main() {
    std::process::exit(cech_core::cli::run(std::env::args_os()));
}
