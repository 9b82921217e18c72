use std::io;

use ruleproof::cli::{run_command, Streams};

fn main() {
    let (mut stdin, mut stdout, mut stderr) = (io::stdin(), io::stdout(), io::stderr());
    let code = run_command(std::env::args_os(), Streams { stdin: &mut stdin, stdout: &mut stdout, stderr: &mut stderr });
    std::process::exit(code);
}
