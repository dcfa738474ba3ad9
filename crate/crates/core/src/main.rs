fn main() {
    let outcome = choquet::cli::run_from(std::env::args_os());
    if outcome.is_error {
        eprint!("{}", outcome.text);
    } else {
        print!("{}", outcome.text);
    }
    std::process::exit(outcome.status);
}
