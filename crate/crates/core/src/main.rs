use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(transeval::cli::main_with_args(std::env::args_os()))
}
