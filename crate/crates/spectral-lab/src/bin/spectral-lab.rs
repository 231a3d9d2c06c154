fn main() {
    std::process::exit(spectral_lab::cli::run(std::env::args()));
}
