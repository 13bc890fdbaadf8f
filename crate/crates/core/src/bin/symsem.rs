use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let mut io = symsem::cli::Io {
        stdin: &mut stdin.lock(),
        stdout: &mut io::stdout().lock(),
        stderr: &mut io::stderr().lock(),
    };
    let code = symsem::cli::run(std::env::args_os(), &mut io);
    ExitCode::from(code as u8)
}
