fn main() {
    std::process::exit(nct_morita_cli::run(std::env::args_os()));
}
