fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    std::process::exit(whitham_cli::dispatch(std::env::args_os()));
}
