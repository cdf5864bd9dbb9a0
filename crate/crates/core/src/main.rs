use std::io;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let code = tailor::cli::main_with(argv, &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
