fn main() {
    std::process::exit(qdp::cli::run());
}
