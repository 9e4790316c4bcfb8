use std::process::ExitCode;

use clap::Parser;
use mpkrylov_bench::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rows) => {
            let failed = rows.iter().filter(|r| r.failure.is_some()).count();
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                eprintln!("{failed} of {} cells could not run", rows.len());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
