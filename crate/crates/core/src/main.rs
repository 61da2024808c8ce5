fn main() -> std::process::ExitCode {
    kpiforge::cli::main_with_args(std::env::args_os())
}
