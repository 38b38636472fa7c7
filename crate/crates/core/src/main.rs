use std::io;

fn main() {
    let code = ratinterp::cli::main_with(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
