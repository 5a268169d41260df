use std::process::ExitCode;

fn main() -> ExitCode {
    smm::cli::main_with_args(std::env::args_os())
}
