fn main() {
    std::process::exit(qinv::cli::run(std::env::args_os()));
}
