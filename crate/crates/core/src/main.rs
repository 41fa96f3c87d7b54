fn main() {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .init();
    let code = dyadic::cli::run(std::env::args_os());
    std::process::exit(code);
}
