fn main() {
    std::process::exit(mippv::cli::cli_dispatch(std::env::args_os()));
}
