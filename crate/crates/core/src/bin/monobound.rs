fn main() {
    std::process::exit(monobound::cli::run(std::env::args_os()));
}
