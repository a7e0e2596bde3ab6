use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;
use dimotif_cli::{run, CliError, RunConfig};

fn main() {
    // exit code 2 is reserved for an oracle mismatch
    let cfg = RunConfig::try_parse().unwrap_or_else(|e| {
        let _ = e.print();
        std::process::exit(if e.use_stderr() { 1 } else { 0 });
    });
    let mut log = io::stderr();
    let result = match &cfg.output {
        Some(path) => File::create(path)
            .map_err(|source| CliError::Open {
                path: path.clone(),
                source,
            })
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                let status = run(&cfg, &mut w, &mut log)?;
                w.flush()?;
                Ok(status)
            }),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            run(&cfg, &mut w, &mut log)
        }
    };
    match result {
        Ok(status) => std::process::exit(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
