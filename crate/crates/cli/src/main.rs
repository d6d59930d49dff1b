fn main() {
    std::process::exit(ccc4_cli::run(std::env::args_os()));
}
