fn main() {
    std::process::exit(slprime_cli::run(std::env::args_os()));
}
