fn main() {
    std::process::exit(jclattice::cli::run(std::env::args_os()));
}
