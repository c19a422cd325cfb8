use std::process::ExitCode;

fn main() -> ExitCode {
    fpsolve::cli::run()
}
