fn main() {
    std::process::exit(jsgraph::cli::run(std::env::args_os()));
}
