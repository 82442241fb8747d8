//! Thin binary wrapper; all behavior lives in [`rfa::cli`].

use std::process::ExitCode;

fn main() -> ExitCode {
    rfa::cli::main()
}
