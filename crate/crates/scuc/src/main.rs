use clap::Parser;

fn main() -> std::process::ExitCode {
    scuc::cli::main_with(scuc::cli::Cli::parse())
}
