fn main() {
    std::process::exit(landau_torus::cli::run(std::env::args_os()));
}
