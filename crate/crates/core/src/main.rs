use clap::Parser;
use responsum::cli::{main_with, Args, EXIT_OK, EXIT_VALIDATION};

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(main_with(&args));
}
