use inexact_gd::cli::{main_with_args, Io};

fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = main_with_args(
        std::env::args_os(),
        &mut Io {
            out: &mut stdout.lock(),
            err: &mut stderr.lock(),
        },
    );
    std::process::exit(code);
}
