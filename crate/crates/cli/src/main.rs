use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use uat_topo::{run, thread_cap, Cli, CliError};

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match thread_cap() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return fail(&CliError::Config(format!("thread pool: {e}")));
            }
        }
        Ok(None) => {}
        Err(e) => return fail(&e),
    }
    let (report, code) = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let body = report.to_json();
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &body).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    };
    if let Err(e) = written {
        return fail(&e);
    }
    if code != 0 {
        if let Some(msg) = report.results.get("error").and_then(|v| v.as_str()) {
            eprintln!("error: {msg}");
        } else {
            eprintln!("certificate did not pass");
        }
    }
    ExitCode::from(code as u8)
}
