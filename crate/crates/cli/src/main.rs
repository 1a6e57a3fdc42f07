fn main() {
    std::process::exit(rabi_cli::run(std::env::args_os()));
}
