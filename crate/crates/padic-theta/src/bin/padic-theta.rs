fn main() {
    std::process::exit(padic_theta::cli_io::run(std::env::args_os()));
}
