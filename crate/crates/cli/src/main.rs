fn main() {
    std::process::exit(disnet_cli::run_cli(std::env::args_os()));
}
