fn main() -> std::process::ExitCode {
    frac_nehari::cli::main()
}
