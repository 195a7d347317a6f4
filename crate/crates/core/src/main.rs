fn main() {
    std::process::exit(maxseq::cli::run(std::env::args_os()));
}
