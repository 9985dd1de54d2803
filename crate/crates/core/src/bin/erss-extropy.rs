fn main() {
    std::process::exit(erss_extropy::cli::run(std::env::args_os()));
}
