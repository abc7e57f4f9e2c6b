fn main() {
    std::process::exit(nilcurv_cli::run(std::env::args_os()));
}
