use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lobcancel_core::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(failure) => {
            let broken_pipe = failure
                .error
                .downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe);
            if broken_pipe {
                return ExitCode::SUCCESS;
            }
            let _ = out.flush();
            eprintln!("error: {failure}");
            failure.code
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
