fn main() -> std::process::ExitCode {
    dsltower::cli::main()
}
