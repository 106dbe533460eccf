fn main() {
    std::process::exit(diracwalk_cli::run(std::env::args()));
}
