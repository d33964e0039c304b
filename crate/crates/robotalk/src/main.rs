fn main() {
    std::process::exit(robotalk::cli::run(std::env::args_os()));
}
