fn main() {
    std::process::exit(dtn_speed::cli::run(std::env::args_os()));
}
