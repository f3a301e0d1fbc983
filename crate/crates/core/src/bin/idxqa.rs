use std::process::ExitCode;

fn main() -> ExitCode {
    idxqa::cli::main_with_args(std::env::args_os())
}
