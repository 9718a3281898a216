fn main() {
    std::process::exit(copspec::cli::cli_dispatch(std::env::args()));
}
