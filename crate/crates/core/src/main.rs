fn main() {
    let code = homcert::cli::run(std::env::args_os());
    std::process::exit(code);
}
