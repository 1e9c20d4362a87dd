fn main() {
    std::process::exit(opo_interference::cli::run(std::env::args_os()));
}
