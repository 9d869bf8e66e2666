fn main() {
    std::process::exit(mfclust::cli::main_with_args(std::env::args_os()));
}
