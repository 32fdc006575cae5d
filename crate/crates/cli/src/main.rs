fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(tracklab_report::app::main_with(std::env::args_os()))
}
