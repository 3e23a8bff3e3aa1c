//! JSON envelope and exit-code mapping.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use opshort::numkit::io::IoError;
use opshort::numkit::{LinalgError, Tol};
use opshort::{douglas, lab, parallel, polar, shorting};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotSolvable,
    Borderline,
    Invariant,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NotSolvable => 3,
            Status::Borderline => 4,
            Status::Invariant => 5,
        }
    }
}

pub struct Envelope {
    tol: Tol,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    tol: Tol,
    result: &'a T,
}

impl Envelope {
    pub fn new(tol: Tol) -> Self {
        Self { tol }
    }

    /// Writes `{tool, version, command, tol, result}` as pretty JSON.
    pub fn write<T: Serialize>(&self, out: &Option<PathBuf>, command: &str, result: &T) -> Result<()> {
        let doc = Document { tool: "opshort", version: VERSION, command, tol: self.tol, result };
        let mut text = serde_json::to_string_pretty(&doc).context("serializing output")?;
        text.push('\n');
        match out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Exit code for a failed run: verdict-like failures map to 3, invariant
/// violations to 5, everything else is an input problem (2).
pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(d) = cause.downcast_ref::<douglas::DouglasError>() {
            return match d {
                douglas::DouglasError::NotSolvable { .. } => 3,
                douglas::DouglasError::Linalg(_) => 2,
            };
        }
        if let Some(s) = cause.downcast_ref::<shorting::ShortingError>() {
            return match s {
                shorting::ShortingError::NotWeaklyComplementable { .. } => 3,
                shorting::ShortingError::InvariantViolation(_) | shorting::ShortingError::WitnessInvalid(_) => 5,
                shorting::ShortingError::Linalg(_) => 2,
            };
        }
        if let Some(p) = cause.downcast_ref::<parallel::ParallelError>() {
            return match p {
                parallel::ParallelError::InvariantViolation(_) => 5,
                parallel::ParallelError::Shorting(s) => exit_code_for(&anyhow::Error::new(s.clone())),
                parallel::ParallelError::Douglas(douglas::DouglasError::NotSolvable { .. }) => 3,
                _ => 2,
            };
        }
        if let Some(l) = cause.downcast_ref::<lab::LabError>() {
            return match l {
                lab::LabError::InvariantViolation(_) => 5,
                lab::LabError::Shorting(s) => exit_code_for(&anyhow::Error::new(s.clone())),
                lab::LabError::Parallel(parallel::ParallelError::InvariantViolation(_)) => 5,
                lab::LabError::Douglas(douglas::DouglasError::NotSolvable { .. }) => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<polar::PolarError>().is_some()
            || cause.downcast_ref::<LinalgError>().is_some()
            || cause.downcast_ref::<IoError>().is_some()
        {
            return 2;
        }
    }
    2
}
