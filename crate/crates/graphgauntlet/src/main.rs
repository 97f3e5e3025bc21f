fn main() {
    std::process::exit(graphgauntlet::cli::main_entry());
}
