fn main() -> std::process::ExitCode {
    fadingcap_cli::main_with_args(std::env::args_os())
}
