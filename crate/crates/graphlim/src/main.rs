fn main() {
    std::process::exit(graphlim::cli::run());
}
