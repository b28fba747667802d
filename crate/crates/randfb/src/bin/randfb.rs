fn main() {
    std::process::exit(randfb::cli::run());
}
