fn main() {
    std::process::exit(seconet::cli::run());
}
