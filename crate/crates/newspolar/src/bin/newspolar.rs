fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(newspolar::cli::run_command(&args));
}
