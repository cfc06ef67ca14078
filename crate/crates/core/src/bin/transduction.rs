use std::process::exit;

fn main() {
    exit(transduction::cli::main_with_args(std::env::args_os()));
}
