fn main() {
    std::process::exit(symdiff::cli::main());
}
