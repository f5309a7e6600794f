fn main() {
    std::process::exit(orbitforge::cli::run());
}
