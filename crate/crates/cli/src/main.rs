fn main() {
    std::process::exit(cfconv_cli::run(std::env::args()));
}
