fn main() -> std::process::ExitCode {
    rankin_cohen::cli::main()
}
