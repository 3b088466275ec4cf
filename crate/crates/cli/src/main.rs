fn main() {
    std::process::exit(ltl_cli::run(std::env::args_os()));
}
