fn main() -> std::process::ExitCode {
    twinforge::harness::cli::main()
}
