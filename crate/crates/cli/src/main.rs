use std::process::ExitCode;

use srt_lab::{parse_and_validate, run, threads_from_env, CliError};

fn main() -> ExitCode {
    let config = match parse_and_validate(std::env::args_os()) {
        Ok(c) => c,
        Err(CliError::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match threads_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&config) {
        Ok(rows) => {
            let mut failed = 0;
            for row in &rows {
                if let Err(e) = &row.outcome {
                    failed += 1;
                    eprintln!(
                        "error: {} N={} at {} dB ({}): {e}",
                        row.scheme, row.n_relays, row.gamma_db, row.method
                    );
                }
            }
            if failed > 0 {
                eprintln!("{failed} of {} rows failed", rows.len());
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
