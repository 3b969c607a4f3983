use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = tricc_cli::Cli::parse();
    match tricc_cli::run(&cli) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("reports are valid JSON")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
