//! Command-line front end. [`run`] does all the work and returns the exit
//! code with the text that would be printed, so it can be driven in-process.

pub mod args;
mod commands;

use args::Cli;
use clap::Parser;
use std::ffi::OsString;

pub const EXIT_OK: i32 = 0;
/// A violation, countermodel or non-laminar family was found.
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// The answer rests on a bounded search that found nothing.
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => commands::dispatch(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}
