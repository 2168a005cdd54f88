use std::process::ExitCode;

fn main() -> ExitCode {
    bama::cli::main()
}
