fn main() {
    std::process::exit(waring::cli::run());
}
