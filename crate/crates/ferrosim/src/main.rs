fn main() {
    std::process::exit(ferrosim::cli::run());
}
