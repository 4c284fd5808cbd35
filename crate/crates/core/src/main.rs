fn main() {
    std::process::exit(qmarginals::cli::main());
}
