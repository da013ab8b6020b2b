fn main() {
    std::process::exit(surfhj::cli::cli_main(std::env::args_os()));
}
