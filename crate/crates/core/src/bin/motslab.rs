fn main() {
    std::process::exit(motslab::cli::run(std::env::args_os()));
}
