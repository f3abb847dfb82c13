fn main() {
    std::process::exit(omseq::cli::run(std::env::args_os()));
}
