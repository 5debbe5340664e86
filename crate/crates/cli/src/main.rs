fn main() {
    std::process::exit(dtl_cli::run(std::env::args_os()));
}
