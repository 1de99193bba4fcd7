fn main() {
    std::process::exit(squeeze_kit::cli::run(std::env::args_os()));
}
