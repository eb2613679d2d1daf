fn main() {
    std::process::exit(ewmeval::cli::run());
}
