use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = pixcrypt::cli::run(std::env::args_os());
    print!("{}", outcome.stdout);
    if !outcome.diagnostics.is_empty() {
        eprint!("{}", outcome.diagnostics);
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.exit_code as u8)
}
