use std::io::Write;

use fdgtool::cli::{run, Env};

fn main() {
    let out = run(std::env::args_os(), &Env::from_process());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
