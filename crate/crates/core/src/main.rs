fn main() {
    std::process::exit(chemtime::cli::main_with_args(std::env::args_os()));
}
