use std::process::ExitCode;

fn main() -> ExitCode {
    specreg_cli::commands::run()
}
