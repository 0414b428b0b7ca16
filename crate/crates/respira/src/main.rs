fn main() {
    std::process::exit(respira::run_cli());
}
