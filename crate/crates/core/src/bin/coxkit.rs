use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = coxkit::cli::run_args(std::env::args_os());
    let ok = outcome.status == coxkit::cli::EXIT_DECIDED || outcome.status == coxkit::cli::EXIT_UNKNOWN;
    let written = if ok {
        std::io::stdout().write_all(outcome.output.as_bytes())
    } else {
        std::io::stderr().write_all(outcome.output.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.status as u8)
}
