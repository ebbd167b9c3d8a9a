fn main() {
    std::process::exit(plap::cli::run(std::env::args_os()));
}
