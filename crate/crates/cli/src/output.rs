use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use genus4::search::ENGINE_VERSION;
use genus4::verify::digest_lines;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub engine_version: &'static str,
    pub subcommand: String,
    pub parameters: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_s: f64,
    pub records: u64,
    /// Search only: scanned vectors per second.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub throughput: Option<f64>,
    /// SHA-256 over the sorted hashes of the certificate lines.
    pub digest: String,
    pub result: Value,
}

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Write to a sibling temp file and rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    for l in lines {
        writeln!(f, "{l}").map_err(io_err(path))?;
    }
    f.flush().map_err(io_err(path))
}

pub fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_owned).collect())
}

/// A finished subcommand: its JSON-lines records and a result summary.
pub struct Artifact {
    pub name: String,
    pub parameters: Value,
    pub inputs: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub result: Value,
}

pub fn manifest_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}.manifest.json"))
}

/// Emit `<stem>.jsonl` and `<stem>.manifest.json` under `dir`.
pub fn emit(dir: &Path, a: Artifact, started: Instant) -> Result<RunManifest, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let out = dir.join(format!("{}.jsonl", a.name));
    write_lines(&out, &a.lines)?;
    let manifest = RunManifest {
        engine_version: ENGINE_VERSION,
        subcommand: a.name.clone(),
        parameters: a.parameters,
        inputs: a.inputs,
        outputs: vec![out],
        wall_clock_s: started.elapsed().as_secs_f64(),
        records: a.lines.len() as u64,
        throughput: None,
        digest: digest_lines(&a.lines),
        result: a.result,
    };
    save_manifest(dir, &a.name, &manifest)?;
    Ok(manifest)
}

pub fn save_manifest(dir: &Path, stem: &str, m: &RunManifest) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    write_atomic(&manifest_path(dir, stem), text.as_bytes())
}
