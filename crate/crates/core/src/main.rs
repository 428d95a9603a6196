fn main() {
    std::process::exit(dce_arma::cli::main_with_args(std::env::args_os()));
}
