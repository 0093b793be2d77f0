use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pk_cutoff::cli::run(std::env::args_os()))
}
