use std::process::ExitCode;

mod checks;
mod cli;
mod config;
mod error;
mod experiment;
mod report;

use error::CliError;

/// Honors `MIXSEL_THREADS` by capping the global worker pool before any
/// parallel work starts.
fn init_threads() -> Result<(), CliError> {
    match std::env::var("MIXSEL_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let threads: usize = raw.trim().parse().map_err(|_| {
                CliError::Validation(format!("MIXSEL_THREADS=`{raw}` is not a positive integer"))
            })?;
            if threads == 0 {
                return Err(CliError::Validation(
                    "MIXSEL_THREADS must be at least 1".to_string(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let outcome = init_threads().and_then(|()| cli::run());
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
