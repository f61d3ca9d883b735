fn main() {
    std::process::exit(tensor_tprod::cli::run(std::env::args_os()));
}
