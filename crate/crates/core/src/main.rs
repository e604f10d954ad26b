use std::io::Write;

fn main() {
    let out = conslaw::frontend::cli::run_command(std::env::args_os().skip(1));
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
