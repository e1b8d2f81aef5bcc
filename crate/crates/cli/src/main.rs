fn main() {
    std::process::exit(horocusp_cli::main_with(std::env::args_os()));
}
