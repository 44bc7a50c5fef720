fn main() {
    std::process::exit(curved_larmor::cli::main_with_args(std::env::args_os()));
}
