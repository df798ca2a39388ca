fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(mgd::cli::cli_main(&argv));
}
