fn main() {
    std::process::exit(twostep_mle::cli::main_with_args(std::env::args_os()));
}
