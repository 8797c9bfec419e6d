fn main() {
    std::process::exit(hastings_lab::cli::main_entry());
}
