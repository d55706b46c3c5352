fn main() {
    std::process::exit(qmover::cli::run());
}
