fn main() {
    std::process::exit(wssus_cli::run(std::env::args_os()));
}
