fn main() {
    std::process::exit(socio_grid_sim::cli::run_from(std::env::args_os()));
}
