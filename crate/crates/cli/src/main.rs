use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fracdelay_cli::run(std::env::args_os()))
}
