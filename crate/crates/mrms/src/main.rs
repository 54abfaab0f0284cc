fn main() {
    std::process::exit(mrms::cli::run(std::env::args_os()));
}
