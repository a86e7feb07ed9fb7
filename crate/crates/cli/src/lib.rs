//! Command-line front end: every subcommand produces JSON reports carrying
//! the ring parameters, seed and build revision, and maps failures to exit
//! codes (0 pass, 1 verification, 2 input, 3 precision).

pub mod args;
pub mod commands;
pub mod report;
pub mod sweep;

use std::io::Write;

use gradwin::{Error, Result};

pub use args::{Cli, Command, Common};
pub use report::{Output, Provenance};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::RingInfo { .. } => "ring-info",
        Command::SymBuild(_) => "sym-build",
        Command::Deform { .. } => "deform",
        Command::Connection { .. } => "connection",
        Command::Dwork { .. } => "dwork",
        Command::Slopes { .. } => "slopes",
        Command::Extpow { .. } => "extpow",
        Command::Localmodel { .. } => "localmodel",
        Command::Sweep(_) => "sweep",
    }
}

/// Runs a subcommand without touching the filesystem beyond its inputs.
pub fn execute(cli: &Cli) -> Result<Output> {
    let c = &cli.common;
    match &cli.command {
        Command::RingInfo { samples } => commands::ring_info(c, *samples),
        Command::SymBuild(a) => commands::sym_build(c, a),
        Command::Deform { structure } => commands::deform(c, structure),
        Command::Connection { structure } => commands::connection(c, structure),
        Command::Dwork { structure, connection } => commands::dwork(c, structure, connection),
        Command::Slopes { module } => commands::slopes(c, module),
        Command::Extpow { window, k, twist, trials } => commands::extpow(c, window, *k, twist.as_deref(), *trials),
        Command::Localmodel { n, k, nu, mu, max_n, samples } => {
            commands::localmodel(c, &commands::ChartChoice { n: *n, k: *k, nu: *nu, mu: *mu, max_n: *max_n }, *samples)
        }
        Command::Sweep(a) => sweep::sweep(c, a),
    }
}

fn write_output(cli: &Cli, out: &Output) -> Result<()> {
    match &cli.common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))?;
            for (name, text) in &out.files {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            let mut stdout = std::io::stdout().lock();
            if matches!(cli.command, Command::Sweep(_)) {
                let _ = stdout.write_all(sweep::table(&out.files[0].1).as_bytes());
            }
            let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
            let _ = writeln!(stdout, "{} {} -> {}", if out.pass { "PASS" } else { "FAIL" }, names.join(", "), dir.display());
        }
        None => {
            let _ = std::io::stdout().lock().write_all(out.files[0].1.as_bytes());
        }
    }
    Ok(())
}

/// Full run including output and error reporting; returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let name = command_name(&cli.command);
    let result = execute(cli).and_then(|out| write_output(cli, &out).map(|_| out.pass));
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let code = e.exit_code();
            let rep = report::ErrorReport { command: name, exit_code: code, error: report::ErrorBody::from_error(&e) };
            eprint!("{}", report::to_pretty(&rep));
            code
        }
    }
}
