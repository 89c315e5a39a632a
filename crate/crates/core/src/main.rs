fn main() {
    std::process::exit(shaped_partition::cli::run_from(std::env::args_os()));
}
