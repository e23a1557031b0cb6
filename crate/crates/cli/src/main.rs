fn main() {
    std::process::exit(magic_cli::run(std::env::args()));
}
