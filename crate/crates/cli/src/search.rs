use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use genus4::search::{run_batches, Checkpoint, HitCertificate, SearchCase, SearchError, SearchOptions, SearchStats, ENGINE_VERSION};
use genus4::verify::{digest_lines, CaseSummary, Verifier};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{io_err, read_lines, save_manifest, write_atomic, write_lines, RunManifest};
use crate::CliError;

/// What a checkpoint file holds: where to continue, and what was already done.
#[derive(Debug, Serialize, Deserialize)]
struct Progress {
    checkpoint: Checkpoint,
    range_start: u64,
    stats: SearchStats,
    /// Certificate lines written up to `checkpoint.next_index`.
    lines: u64,
}

pub struct SearchRequest<'a> {
    pub case: &'a SearchCase,
    pub start: u64,
    pub end: u64,
    pub opts: SearchOptions,
    pub batch: u64,
    pub checkpoint: Option<PathBuf>,
    pub max_batches: Option<u64>,
}

pub enum SearchRun {
    Finished(Box<RunManifest>, CaseSummary),
    Interrupted(Checkpoint),
}

enum Stop {
    Requested,
    Cli(CliError),
}

impl From<SearchError> for Stop {
    fn from(e: SearchError) -> Self {
        Stop::Cli(e.into())
    }
}

fn load_progress(path: &Path) -> Result<Option<Progress>, CliError> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| CliError::Usage(format!("{}: not a checkpoint: {e}", path.display())))
}

fn index_of_line(line: &str) -> Result<u64, CliError> {
    serde_json::from_str::<HitCertificate>(line)
        .map(|h| h.index)
        .map_err(|e| CliError::Invariant(format!("corrupt certificate line: {e}")))
}

pub fn run(dir: &Path, req: SearchRequest) -> Result<SearchRun, CliError> {
    let started = Instant::now();
    let case = req.case;
    let stem = format!("search-{}", case.id);
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let cert_path = dir.join(format!("{stem}.jsonl"));

    let mut verifier = Verifier::new(case, req.start, req.end, &req.opts);
    let mut progress = match req.checkpoint.as_deref().map(load_progress).transpose()?.flatten() {
        Some(p) => {
            p.checkpoint.validate(case.id, req.end, &req.opts)?;
            if p.range_start != req.start {
                return Err(CliError::Usage(format!("checkpoint started at {}, not {}", p.range_start, req.start)));
            }
            // Drop lines written after the last saved checkpoint.
            let mut lines = if cert_path.exists() { read_lines(&cert_path)? } else { Vec::new() };
            if (lines.len() as u64) < p.lines {
                return Err(CliError::Invariant(format!("{} lost certificate lines", cert_path.display())));
            }
            lines.truncate(p.lines as usize);
            write_lines(&cert_path, &lines)?;
            for l in &lines {
                verifier.absorb_line(l).map_err(|e| CliError::Invariant(format!("corrupt certificate line: {e}")))?;
            }
            eprintln!("resuming {} at index {} ({} certificates kept)", case.id, p.checkpoint.next_index, lines.len());
            p
        }
        None => {
            write_lines(&cert_path, &[])?;
            Progress {
                checkpoint: Checkpoint::start(case.id, req.start, req.end, &req.opts),
                range_start: req.start,
                stats: SearchStats::default(),
                lines: 0,
            }
        }
    };

    let mut file = OpenOptions::new().append(true).open(&cert_path).map_err(io_err(&cert_path))?;
    let resumed_at = progress.checkpoint.next_index;
    let mut batches = 0u64;
    let session = run_batches(case, progress.checkpoint.clone(), req.batch, &req.opts, |out, ck| {
        let mut hits = out.hits.clone();
        for l in verifier.absorb_hits(&mut hits) {
            writeln!(file, "{l}").map_err(|e| Stop::Cli(io_err(&cert_path)(e)))?;
            progress.lines += 1;
        }
        file.flush().map_err(|e| Stop::Cli(io_err(&cert_path)(e)))?;
        progress.stats.merge(&out.stats);
        progress.checkpoint = ck.clone();
        if let Some(path) = &req.checkpoint {
            let text = serde_json::to_string(&progress).expect("progress serializes");
            write_atomic(path, text.as_bytes()).map_err(Stop::Cli)?;
        }
        batches += 1;
        eprintln!("{}: {} / {} scanned, {} certificates", case.id, ck.next_index, ck.range_end, progress.lines);
        match req.max_batches {
            Some(m) if batches >= m && !ck.is_done() => Err(Stop::Requested),
            _ => Ok(()),
        }
    });
    let session = match session {
        Ok(s) => s,
        Err(Stop::Requested) => return Ok(SearchRun::Interrupted(progress.checkpoint)),
        Err(Stop::Cli(e)) => return Err(e),
    };
    drop(file);

    verifier.absorb_stats(&progress.stats);
    let summary = verifier.finish();
    // Certificates sorted by index; scaled copies may have arrived out of order.
    let mut lines = read_lines(&cert_path)?;
    let mut keyed = lines.drain(..).map(|l| Ok((index_of_line(&l)?, l))).collect::<Result<Vec<_>, CliError>>()?;
    keyed.sort();
    let lines: Vec<String> = keyed.into_iter().map(|(_, l)| l).collect();
    write_lines(&cert_path, &lines)?;
    if digest_lines(&lines) != summary.digest {
        return Err(CliError::Invariant("certificate file does not match the run".into()));
    }

    let wall = started.elapsed().as_secs_f64();
    let manifest = RunManifest {
        engine_version: ENGINE_VERSION,
        subcommand: "search".into(),
        parameters: json!({
            "case": case.id,
            "range_start": req.start,
            "range_end": req.end,
            "target": req.opts.target,
            "normalize_scaling": req.opts.normalize_scaling,
            "workers": req.opts.workers,
            "batch": req.batch,
            "checkpoint": req.checkpoint,
            "resumed_at": (resumed_at != req.start).then_some(resumed_at),
        }),
        inputs: req.checkpoint.clone().into_iter().collect(),
        outputs: vec![cert_path],
        wall_clock_s: wall,
        records: lines.len() as u64,
        throughput: Some(session.scanned as f64 / wall.max(1e-9)),
        digest: summary.digest.clone(),
        result: serde_json::to_value(&summary).expect("summary serializes"),
    };
    save_manifest(dir, &stem, &manifest)?;
    Ok(SearchRun::Finished(Box::new(manifest), summary))
}
