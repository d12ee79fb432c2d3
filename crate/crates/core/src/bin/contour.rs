fn main() {
    std::process::exit(contour_kmeans::cli::run_cli(std::env::args_os()));
}
