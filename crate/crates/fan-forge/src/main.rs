fn main() {
    std::process::exit(fan_forge::cli::run(std::env::args_os()));
}
