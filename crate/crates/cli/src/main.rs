use std::process::ExitCode;

fn main() -> ExitCode {
    aoi_cli::run(std::env::args_os())
}
