fn main() {
    std::process::exit(monotangle::cli::main_with_args(std::env::args_os()));
}
