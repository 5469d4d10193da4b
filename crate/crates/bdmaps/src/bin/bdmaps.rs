fn main() {
    std::process::exit(bdmaps::cli::main_with_args(std::env::args_os()));
}
