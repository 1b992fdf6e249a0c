use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use fock_core::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FOCK_LOG", "warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let rendered = run(&cli);
    log::info!("{} finished in {:.3} s", cli.command.name(), start.elapsed().as_secs_f64());

    let written = match &rendered.path {
        Some(path) => std::fs::write(path, &rendered.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(rendered.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        log::error!("{e}");
        eprintln!("fock: {e}");
        return ExitCode::from(2);
    }
    if rendered.exit_code != 0 {
        log::warn!("exit code {}", rendered.exit_code);
    }
    ExitCode::from(rendered.exit_code as u8)
}
