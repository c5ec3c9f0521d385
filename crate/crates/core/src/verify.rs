//! Family runs with every hit analyzed, summarized and digested.
//!
//! The digest is SHA-256 over the sorted SHA-256 hashes of the certificate
//! lines, so it does not depend on worker count, batch size or on where a
//! run was resumed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{analyze, IntersectionReport};
use crate::quadric::QuadricModel;
use crate::search::{run_batches, CaseId, Checkpoint, HitCertificate, SearchCase, SearchError, SearchOptions, SearchStats};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: CaseId,
    pub start: u64,
    pub end: u64,
    pub target: usize,
    pub normalize_scaling: bool,
    pub stats: SearchStats,
    /// Hits by point count over GF(64).
    pub n64: BTreeMap<usize, u64>,
    /// Hits by their set of matching taxonomy rows, joined with `" | "`.
    pub labels: BTreeMap<String, u64>,
    /// Hits passing the good-curve test. Zero for the theorem to hold.
    pub good: u64,
    /// 27-point hits that are neither good nor explained by a taxonomy row.
    pub anomalous: u64,
    pub digest: String,
}

impl CaseSummary {
    pub fn hits(&self) -> u64 {
        self.n64.values().sum()
    }
}

/// One JSON line per hit; `n64` filled, full analysis left out.
pub fn certificate_line(h: &HitCertificate) -> String {
    let mut h = h.clone();
    h.analysis = None;
    serde_json::to_string(&h).expect("certificate serializes")
}

pub fn line_hash(line: &str) -> [u8; 32] {
    Sha256::digest(line.trim_end().as_bytes()).into()
}

/// Order-independent digest of a set of certificate lines.
pub fn digest_hashes(mut hashes: Vec<[u8; 32]>) -> String {
    hashes.sort_unstable();
    let mut h = Sha256::new();
    for x in &hashes {
        h.update(x);
    }
    format!("{:x}", h.finalize())
}

pub fn digest_lines<S: AsRef<str>>(lines: impl IntoIterator<Item = S>) -> String {
    digest_hashes(lines.into_iter().map(|l| line_hash(l.as_ref())).collect())
}

fn analyze_all(model: &QuadricModel, hits: &[HitCertificate]) -> Vec<IntersectionReport> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        hits.par_iter().map(|h| analyze(model, &h.cubic())).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        hits.iter().map(|h| analyze(model, &h.cubic())).collect()
    }
}

/// Accumulates a [`CaseSummary`] batch by batch.
pub struct Verifier {
    model: &'static QuadricModel,
    summary: CaseSummary,
    hashes: Vec<[u8; 32]>,
}

impl Verifier {
    pub fn new(case: &SearchCase, start: u64, end: u64, opts: &SearchOptions) -> Self {
        let model = case.quadric.model();
        Verifier {
            model,
            summary: CaseSummary {
                case: case.id,
                start,
                end,
                target: opts.target,
                normalize_scaling: opts.normalize_scaling,
                stats: SearchStats::new(model.points8.len()),
                n64: BTreeMap::new(),
                labels: BTreeMap::new(),
                good: 0,
                anomalous: 0,
                digest: String::new(),
            },
            hashes: Vec::new(),
        }
    }

    pub fn absorb_stats(&mut self, s: &SearchStats) {
        self.summary.stats.merge(s);
    }

    /// Analyze the hits, fill in `n64`, and return their certificate lines.
    pub fn absorb_hits(&mut self, hits: &mut [HitCertificate]) -> Vec<String> {
        let reports = analyze_all(self.model, hits);
        hits.iter_mut()
            .zip(reports)
            .map(|(h, r)| {
                h.n64 = Some(r.n64);
                let line = certificate_line(h);
                self.hashes.push(line_hash(&line));
                let s = &mut self.summary;
                *s.n64.entry(r.n64).or_default() += 1;
                *s.labels.entry(r.labels.join(" | ")).or_default() += 1;
                s.good += r.good as u64;
                s.anomalous += r.anomalous as u64;
                h.analysis = Some(r);
                line
            })
            .collect()
    }

    /// Re-read a certificate line written by an earlier, interrupted run.
    pub fn absorb_line(&mut self, line: &str) -> Result<(), serde_json::Error> {
        let h: HitCertificate = serde_json::from_str(line)?;
        self.absorb_hits(&mut [h]);
        Ok(())
    }

    pub fn finish(mut self) -> CaseSummary {
        self.summary.digest = digest_hashes(std::mem::take(&mut self.hashes));
        self.summary
    }
}

/// Scan `[start, end)` in batches, analyzing every hit as it arrives.
pub fn verify_case(case: &SearchCase, start: u64, end: u64, opts: &SearchOptions, batch: u64) -> Result<CaseSummary, SearchError> {
    let mut v = Verifier::new(case, start, end, opts);
    let stats = run_batches(case, Checkpoint::start(case.id, start, end, opts), batch, opts, |out, _| {
        let mut hits = out.hits.clone();
        v.absorb_hits(&mut hits);
        Ok::<_, SearchError>(())
    })?;
    v.absorb_stats(&stats);
    Ok(v.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::build_case;

    #[test]
    fn digest_ignores_order_and_trailing_newline() {
        let a = digest_lines(["x", "y\n", "z"]);
        assert_eq!(a, digest_lines(["z", "x", "y"]));
        assert_ne!(a, digest_lines(["x", "y"]));
        assert_eq!(digest_lines(Vec::<String>::new()).len(), 64);
    }

    #[test]
    fn digest_independent_of_batching() {
        let case = build_case(CaseId::Red2).unwrap();
        let opts = SearchOptions::default();
        let end = 1 << 20;
        let a = verify_case(&case, 0, end, &opts, 1 << 20).unwrap();
        let b = verify_case(&case, 0, end, &SearchOptions { workers: Some(1), chunk: 1 << 12, ..opts }, 1 << 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stats.scanned, end);
    }

    #[test]
    fn resumed_lines_reproduce_summary() {
        let case = build_case(CaseId::Red1a).unwrap();
        let opts = SearchOptions::default();
        let end = 1 << 19;
        let whole = verify_case(&case, 0, end, &opts, end).unwrap();
        assert!(whole.hits() > 0);
        let mut v = Verifier::new(&case, 0, end, &opts);
        let mut lines = Vec::new();
        let stats = run_batches(&case, Checkpoint::start(case.id, 0, end, &opts), 1 << 17, &opts, |out, _| {
            lines.extend(Verifier::new(&case, 0, end, &opts).absorb_hits(&mut out.hits.clone()));
            Ok::<_, SearchError>(())
        })
        .unwrap();
        for l in &lines {
            v.absorb_line(l).unwrap();
        }
        v.absorb_stats(&stats);
        assert_eq!(v.finish(), whole);
    }
}
