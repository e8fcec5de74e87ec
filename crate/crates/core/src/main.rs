fn main() {
    std::process::exit(trirec::cli::run(std::env::args_os()));
}
