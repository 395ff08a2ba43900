fn main() {
    std::process::exit(batchlab::cli::main());
}
