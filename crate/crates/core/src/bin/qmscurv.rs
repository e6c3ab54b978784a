fn main() {
    std::process::exit(qms_curvature::cli::run(std::env::args_os()));
}
