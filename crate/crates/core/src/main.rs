fn main() {
    std::process::exit(smma::cli::run());
}
