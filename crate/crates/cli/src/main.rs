fn main() {
    std::process::exit(numrange_cli::run(std::env::args_os()));
}
