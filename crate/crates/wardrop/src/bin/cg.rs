use std::process::ExitCode;

fn main() -> ExitCode {
    wardrop::cli::main()
}
