fn main() {
    std::process::exit(dbar_cone::cli::main_with_args(std::env::args_os()));
}
