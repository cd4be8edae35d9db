use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = semimpc::cli::run_cli(std::env::args_os());
    print!("{}", outcome.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
