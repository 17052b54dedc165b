fn main() {
    std::process::exit(convexgrowth_cli::run(std::env::args_os()));
}
