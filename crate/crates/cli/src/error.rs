use std::path::PathBuf;

use fsa_core::FsaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("bad config {path}: {source}")]
    Config { path: PathBuf, source: FsaError },
    #[error("config {path} has no {section} section, which `{command}` needs")]
    MissingSection { path: PathBuf, section: &'static str, command: &'static str },
    #[error("FSA_THREADS must be a positive integer, got {0:?}")]
    Threads(String),
    #[error("computation failed: {0}")]
    Compute(#[from] FsaError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

