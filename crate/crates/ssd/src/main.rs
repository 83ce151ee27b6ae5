fn main() {
    let code = ssd::cli::run(std::env::args().skip(1).collect());
    std::process::exit(code);
}
