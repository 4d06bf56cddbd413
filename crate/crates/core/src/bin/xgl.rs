fn main() {
    std::process::exit(xgl::interface::cli_main(std::env::args_os()));
}
