fn main() -> std::process::ExitCode {
    roomsim::cli::main_with_args(std::env::args_os())
}
