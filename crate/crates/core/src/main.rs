fn main() {
    std::process::exit(vacmix::cli::main_with(std::env::args_os()));
}
