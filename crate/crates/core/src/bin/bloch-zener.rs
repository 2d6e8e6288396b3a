fn main() {
    std::process::exit(bloch_zener::cli::main());
}
