use std::process::ExitCode;

fn main() -> ExitCode {
    bellsim_cli::run()
}
