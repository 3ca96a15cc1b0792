fn main() {
    std::process::exit(hopflift::cli::run(std::env::args_os()));
}
