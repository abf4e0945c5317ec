fn main() -> std::process::ExitCode {
    bamboo_garden::cli::main()
}
