#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Library half of the `ptail` command-line tool: the target-function text
//! format, result envelopes, the comparison-curve CSV file and the
//! validation sweeps.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod commands;
pub mod curve_csv;
pub mod descriptor;
mod error;
pub mod output;
pub mod suites;

pub use error::{exit, CliError};

/// Parses `args`, runs the command and writes to `out`/`err`; returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match commands::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let digits = output::precision_from_env();
    match commands::run(&cli.command, digits) {
        Ok(report) => {
            let written = match &report.raw_stdout {
                Some(raw) => {
                    for w in &report.envelope.warnings {
                        let _ = writeln!(err, "warning: {w}");
                    }
                    out.write_all(raw.as_bytes())
                }
                None => out.write_all(report.envelope.render(cli.format, digits).as_bytes()),
            };
            if let Err(e) = written.and_then(|_| out.flush()) {
                let _ = writeln!(err, "error: writing output: {e}");
                return exit::IO;
            }
            if report.violation {
                exit::VIOLATION
            } else {
                exit::OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
