fn main() {
    std::process::exit(coset_moments::cli::run(std::env::args_os()));
}
