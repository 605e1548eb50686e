fn main() {
    std::process::exit(mjsched::cli::run(std::env::args_os()));
}
