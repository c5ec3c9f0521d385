//! `genus4`: command-line driver for the quadric/cubic verification engine.

mod output;
mod search;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use genus4::analysis::analyze;
use genus4::forms::CubicForm;
use genus4::quadric::{
    count_binary_stabilizer, gf2_orbit_oracle, stabilizer_census, verify_affine_transitivity, CurveKind, QuadricId,
};
use genus4::search::{build_case, CaseId, HitCertificate, SearchError, SearchOptions};
use genus4::verify::CaseSummary;
use genus4::zeta::tables::{defect_entries, tables_csv};
use genus4::zeta::{defect_pipeline, render_audit};
use serde_json::json;
use thiserror::Error;

use output::{emit, io_err, read_lines, write_atomic, Artifact};
use search::{SearchRequest, SearchRun};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Search(#[from] SearchError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Search(SearchError::MalformedRange { .. } | SearchError::NotHomogeneous(_) | SearchError::UnknownCase(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "genus4", version, about = "Exhaustive search for genus-4 curves with 27 points over GF(8)")]
struct Cli {
    /// Directory for certificates and manifests.
    #[arg(long, global = true, default_value = "genus4-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point counts and structure curves of the three quadric models.
    VerifyQuadrics {
        #[arg(long)]
        quadric: Option<QuadricId>,
    },
    /// Stabilizer census, binary stabilizer, affine transitivity, GF(2) orbit oracle.
    VerifyGroups,
    /// Scan a reduced family (or `all`) and analyze every hit.
    Search {
        /// red1a, red1b, red2, red3_p1, red3_p2 or all.
        #[arg(long)]
        case: String,
        /// First linear index (base-8 digit odometer); decimal or 0o-prefixed octal.
        #[arg(long, value_parser = parse_index)]
        range_start: Option<u64>,
        /// One past the last index; defaults to the end of the family.
        #[arg(long, value_parser = parse_index)]
        range_end: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Progress file; resumed from when it exists.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Scan one cubic per scaling class (homogeneous families only).
        #[arg(long)]
        normalize_scaling: bool,
        #[arg(long, default_value_t = 27)]
        target: usize,
        /// Indices per checkpointed batch.
        #[arg(long, default_value_t = 1 << 26)]
        batch: u64,
        /// Stop after this many batches, leaving the checkpoint for a later run.
        #[arg(long, requires = "checkpoint")]
        max_batches: Option<u64>,
    },
    /// Full intersection report for one cubic or a certificate file.
    Analyze {
        #[arg(long)]
        quadric: Option<QuadricId>,
        /// Twenty coefficient codecs, comma separated, in monomial order.
        #[arg(long, conflicts_with = "certificates")]
        cubic: Option<String>,
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Classify every certificate; fails if any hit is good or unexplained.
    Classify {
        #[arg(long)]
        certificates: PathBuf,
    },
    /// Elimination audit of the defect-k zeta types at (q, g).
    Defect {
        #[arg(long, default_value_t = 8)]
        q: u64,
        #[arg(long, default_value_t = 4)]
        g: usize,
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    /// Defect-k tables as CSV.
    Tables {
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
}

fn parse_index(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0o") {
        Some(oct) => u64::from_str_radix(oct, 8),
        None => s.parse(),
    };
    r.map_err(|e| format!("{s:?}: {e}"))
}

fn to_line<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn parse_cubic(s: &str) -> Result<CubicForm<genus4::Gf8>, CliError> {
    let codecs = s
        .split(',')
        .map(|x| x.trim().parse::<u8>().map_err(|e| CliError::Usage(format!("--cubic: {x:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    CubicForm::from_codecs(&codecs).map_err(|e| CliError::Usage(format!("--cubic: {e}")))
}

fn read_certificates(path: &Path) -> Result<Vec<HitCertificate>, CliError> {
    read_lines(path)?
        .iter()
        .map(|l| serde_json::from_str(l).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))))
        .collect()
}

fn verify_quadrics(only: Option<QuadricId>) -> Result<Artifact, CliError> {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for id in [QuadricId::Split, QuadricId::Cone, QuadricId::Nonsplit] {
        if only.is_some_and(|q| q != id) {
            continue;
        }
        let m = id.model();
        let count = |k: CurveKind| m.structure.iter().filter(|c| c.kind == k).count();
        let check = m.check();
        if let Err(e) = &check {
            failures.push(e.to_string());
        }
        let rec = json!({
            "quadric": id,
            "points8": m.points8.len(),
            "points64": m.points64.len(),
            "lines": count(CurveKind::Line),
            "conics": count(CurveKind::Conic),
            "vertex": m.vertex.map(|v| v.codecs()),
            "base_points": m.base_points.iter().map(|p| p.codecs()).collect::<Vec<_>>(),
            "plane_conics": m.plane_conics.len(),
            "check": check.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string()),
        });
        println!("{id}: {} points over GF(8), {} over GF(64), {} lines, {} conics: {}", m.points8.len(), m.points64.len(), count(CurveKind::Line), count(CurveKind::Conic), rec["check"].as_str().unwrap_or(""));
        lines.push(to_line(&rec));
    }
    if !failures.is_empty() {
        return Err(CliError::Invariant(failures.join("; ")));
    }
    Ok(Artifact { name: "verify-quadrics".into(), parameters: json!({ "quadric": only }), inputs: vec![], lines, result: json!({ "ok": true }) })
}

fn verify_groups() -> Result<Artifact, CliError> {
    let census = stabilizer_census();
    let binary = count_binary_stabilizer();
    let affine = verify_affine_transitivity();
    let oracle = gf2_orbit_oracle();
    for r in &census.rows {
        println!("{:<28} order {:>12}  orbit bound {:>10}", r.form, r.formula_order, r.orbit_bound);
    }
    println!("orbit sum {} = (8^10 - 1)/7: {}", census.orbit_sum, census.identity_holds);
    println!("binary stabilizer {} ({} modulo scalars)", binary.count, binary.modulo_scalars);
    println!("affine maps {} on {} subsets, simply transitive: {}", affine.maps, affine.subsets, affine.simply_transitive);
    println!("GF(2) orbits {:?}, separated by signature: {}", oracle.orbit_sizes, oracle.signature_separates);
    let ok = census.identity_holds
        && census.anisotropic_product_consistent
        && census.rows.iter().all(|r| r.all_preserve != Some(false) && r.enumerated_order.is_none_or(|n| n == r.formula_order))
        && (binary.count, binary.modulo_scalars) == (126, 18)
        && affine.simply_transitive
        && oracle.signature_separates;
    let lines = vec![to_line(&census), to_line(&binary), to_line(&affine), to_line(&oracle)];
    if !ok {
        return Err(CliError::Invariant("group accounting does not close".into()));
    }
    Ok(Artifact { name: "verify-groups".into(), parameters: json!({}), inputs: vec![], lines, result: json!({ "orbit_sum": census.orbit_sum.to_string() }) })
}

#[allow(clippy::too_many_arguments)]
fn search_cmd(
    dir: &Path,
    case: &str,
    range_start: Option<u64>,
    range_end: Option<u64>,
    workers: Option<usize>,
    checkpoint: Option<PathBuf>,
    normalize_scaling: bool,
    target: usize,
    batch: u64,
    max_batches: Option<u64>,
) -> Result<(), CliError> {
    let all = case == "all";
    let ids: Vec<CaseId> = if all { CaseId::ALL.to_vec() } else { vec![case.parse()?] };
    if all && (range_start.is_some() || range_end.is_some() || checkpoint.is_some()) {
        return Err(CliError::Usage("--case all takes no range or checkpoint".into()));
    }
    let mut summaries: Vec<CaseSummary> = Vec::new();
    for id in ids {
        let case = build_case(id)?;
        let opts = SearchOptions {
            target,
            normalize_scaling: normalize_scaling && case.is_homogeneous(),
            workers,
            ..SearchOptions::default()
        };
        if normalize_scaling && !case.is_homogeneous() && !all {
            return Err(SearchError::NotHomogeneous(id).into());
        }
        let req = SearchRequest {
            case: &case,
            start: range_start.unwrap_or(0),
            end: range_end.unwrap_or(case.size()),
            opts,
            batch,
            checkpoint: checkpoint.clone(),
            max_batches,
        };
        match search::run(dir, req)? {
            SearchRun::Interrupted(ck) => {
                println!("{id}: stopped at index {} of {}; rerun with the same --checkpoint to continue", ck.next_index, ck.range_end);
                return Ok(());
            }
            SearchRun::Finished(m, s) => {
                println!(
                    "{id}: scanned {} in {:.1}s, {} hits, good {}, anomalous {}, 28-point low-incidence {}, digest {}",
                    s.stats.scanned, m.wall_clock_s, s.hits(), s.good, s.anomalous, s.stats.low_incidence_28, s.digest
                );
                summaries.push(s);
            }
        }
    }
    let bad: Vec<String> = summaries
        .iter()
        .filter(|s| s.target == 27 && (s.good > 0 || s.anomalous > 0))
        .map(|s| format!("{}: {} good, {} anomalous", s.case, s.good, s.anomalous))
        .collect();
    if !bad.is_empty() {
        return Err(CliError::Invariant(bad.join("; ")));
    }
    if all && target == 27 {
        println!("no hit in any family passes the good-curve test");
    }
    Ok(())
}

fn analyze_cmd(quadric: Option<QuadricId>, cubic: Option<String>, certificates: Option<PathBuf>) -> Result<Artifact, CliError> {
    let (lines, inputs) = match (cubic, certificates) {
        (Some(c), None) => {
            let q = quadric.ok_or_else(|| CliError::Usage("--cubic needs --quadric".into()))?;
            let r = analyze(q.model(), &parse_cubic(&c)?);
            println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
            (vec![to_line(&r)], vec![])
        }
        (None, Some(path)) => {
            let certs = read_certificates(&path)?;
            let lines = certs
                .iter()
                .map(|h| to_line(&analyze(quadric.unwrap_or(h.case.quadric()).model(), &h.cubic())))
                .collect();
            (lines, vec![path])
        }
        _ => return Err(CliError::Usage("give --cubic or --certificates".into())),
    };
    Ok(Artifact { name: "analyze".into(), parameters: json!({ "quadric": quadric }), inputs, result: json!({ "reports": lines.len() }), lines })
}

fn classify_cmd(path: PathBuf) -> Result<Artifact, CliError> {
    let certs = read_certificates(&path)?;
    let mut labels: BTreeMap<String, u64> = BTreeMap::new();
    let (mut good, mut anomalous) = (0u64, 0u64);
    let mut lines = Vec::new();
    for h in &certs {
        let r = analyze(h.case.quadric().model(), &h.cubic());
        good += r.good as u64;
        anomalous += r.anomalous as u64;
        *labels.entry(r.labels.join(" | ")).or_default() += 1;
        lines.push(to_line(&json!({
            "case": h.case, "index": h.index, "n8": r.n8, "n64": r.n64,
            "good": r.good, "anomalous": r.anomalous, "labels": r.labels,
        })));
    }
    for (l, n) in &labels {
        println!("{n:>8}  {}", if l.is_empty() { "(none)" } else { l });
    }
    println!("{} certificates, {good} good, {anomalous} anomalous", certs.len());
    if good > 0 || anomalous > 0 {
        return Err(CliError::Invariant(format!("{good} good and {anomalous} unexplained hits in {}", path.display())));
    }
    Ok(Artifact { name: "classify".into(), parameters: json!({}), inputs: vec![path], lines, result: json!({ "labels": labels }) })
}

fn defect_cmd(q: u64, g: usize, k: u32) -> Result<Artifact, CliError> {
    if k > 3 {
        return Err(CliError::Usage("defect tables are built for k <= 3".into()));
    }
    genus4::zeta::prime_power(q).map_err(|e| CliError::Usage(e.to_string()))?;
    let r = defect_pipeline(q, g, k);
    print!("{}", render_audit(&r));
    let lines = r.entries.iter().map(to_line).collect();
    let result = json!({ "survivors": r.survivors, "frac_two_sqrt_q": r.frac_two_sqrt_q });
    Ok(Artifact { name: "defect".into(), parameters: json!({ "q": q, "g": g, "k": k }), inputs: vec![], lines, result })
}

fn tables_cmd(dir: &Path, k: u32) -> Result<Artifact, CliError> {
    if k > 3 {
        return Err(CliError::Usage("defect tables are built for k <= 3".into()));
    }
    let entries = defect_entries(k);
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (class, csv) in tables_csv(&entries) {
        let path = dir.join(format!("defect{k}-type{class}.csv"));
        write_atomic(&path, csv.as_bytes())?;
        println!("# type {class}\n{csv}");
        written.push(path);
    }
    let lines = entries.iter().map(to_line).collect();
    Ok(Artifact { name: "tables".into(), parameters: json!({ "k": k }), inputs: vec![], lines, result: json!({ "csv": written }) })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let dir = cli.out.as_path();
    let artifact = match cli.command {
        Command::VerifyQuadrics { quadric } => verify_quadrics(quadric)?,
        Command::VerifyGroups => verify_groups()?,
        Command::Search { case, range_start, range_end, workers, checkpoint, normalize_scaling, target, batch, max_batches } => {
            return search_cmd(dir, &case, range_start, range_end, workers, checkpoint, normalize_scaling, target, batch, max_batches);
        }
        Command::Analyze { quadric, cubic, certificates } => analyze_cmd(quadric, cubic, certificates)?,
        Command::Classify { certificates } => classify_cmd(certificates)?,
        Command::Defect { q, g, k } => defect_cmd(q, g, k)?,
        Command::Tables { k } => tables_cmd(dir, k)?,
    };
    let m = emit(dir, artifact, started)?;
    eprintln!("wrote {} records, digest {}", m.records, m.digest);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
