fn main() {
    std::process::exit(hurwitz_frobenius::cli::run(std::env::args_os()));
}
