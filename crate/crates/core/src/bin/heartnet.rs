fn main() {
    std::process::exit(heartnet::cli::main_with_args());
}
