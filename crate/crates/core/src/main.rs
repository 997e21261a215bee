fn main() {
    std::process::exit(gamefi_sim::cli::cli_main(std::env::args_os()));
}
