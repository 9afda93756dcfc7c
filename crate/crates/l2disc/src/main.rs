use std::io::{stderr, stdout};

fn main() {
    let code = l2disc::cli::run(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
