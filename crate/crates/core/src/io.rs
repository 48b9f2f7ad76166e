//! Signal ingestion, report serialization and run manifests.
//!
//! JSON payloads are wrapped in a versioned envelope that also spells out
//! the level convention, so files stay interpretable on their own. Files
//! are written to a temporary sibling and renamed into place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::QqPoint;
use crate::error::{HurstError, Result};
use crate::estimators::HurstEstimate;
use crate::simharness::SimulationReport;
use crate::synthesis::{Signal, SignalOrigin};
use crate::transform::{DwtDecomposition, NdwtDecomposition};

pub const SCHEMA_VERSION: u32 = 1;

pub const LEVEL_CONVENTION: &str =
    "level j = J - s, J = ceil(log2 n), scale index s = 1 is the finest detail (j = J - 1)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFormat {
    Auto,
    Text,
    Csv,
    Bin,
}

impl FromStr for SignalFormat {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(SignalFormat::Auto),
            "text" | "txt" => Ok(SignalFormat::Text),
            "csv" => Ok(SignalFormat::Csv),
            "bin" => Ok(SignalFormat::Bin),
            _ => Err(HurstError::InvalidParameter(format!(
                "unknown signal format `{s}`"
            ))),
        }
    }
}

impl SignalFormat {
    fn resolve(self, path: &Path) -> SignalFormat {
        if self != SignalFormat::Auto {
            return self;
        }
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
        {
            Some(ext) if ext == "bin" || ext == "f64" => SignalFormat::Bin,
            Some(ext) if ext == "csv" => SignalFormat::Csv,
            _ => SignalFormat::Text,
        }
    }
}

/// File name component only; never an absolute path.
pub fn portable_name(path: &Path) -> PathBuf {
    path.file_name().map(PathBuf::from).unwrap_or_default()
}

/// Read a signal. Text holds one decimal per line (blank lines skipped);
/// CSV takes `column` by header name, or else the first numeric column;
/// bin is a flat array of little-endian f64. Rows are 1-based.
pub fn read_signal(path: &Path, format: SignalFormat, column: Option<&str>) -> Result<Signal> {
    let bytes = read_bytes(path)?;
    if bytes.is_empty() {
        return Err(HurstError::EmptyFile);
    }
    let samples = match format.resolve(path) {
        SignalFormat::Bin => parse_bin(&bytes)?,
        SignalFormat::Csv => parse_csv(&bytes, column)?,
        _ => parse_text(&bytes)?,
    };
    if samples.is_empty() {
        return Err(HurstError::EmptyFile);
    }
    Signal::new(
        samples,
        SignalOrigin::Ingested {
            source: portable_name(path),
        },
    )
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => HurstError::NotFound(portable_name(path)),
        _ => HurstError::Io(e),
    })
}

fn finite(row: usize, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HurstError::NonFiniteSample(row))
    }
}

fn parse_text(bytes: &[u8]) -> Result<Vec<f64>> {
    let text = std::str::from_utf8(bytes).map_err(|e| HurstError::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| HurstError::Parse {
            row: i + 1,
            message: format!("`{line}` is not a number"),
        })?;
        out.push(finite(i + 1, v)?);
    }
    Ok(out)
}

fn parse_bin(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(HurstError::Parse {
            row: bytes.len() / 8 + 1,
            message: format!("{} bytes is not a whole number of f64 values", bytes.len()),
        });
    }
    bytes
        .chunks_exact(8)
        .enumerate()
        .map(|(i, c)| {
            finite(
                i + 1,
                f64::from_le_bytes(c.try_into().expect("8-byte chunk")),
            )
        })
        .collect()
}

fn parse_csv(bytes: &[u8], column: Option<&str>) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let records = reader
        .records()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| HurstError::Parse {
                row: i + 1,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = records.first() else {
        return Err(HurstError::EmptyFile);
    };
    let has_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let data_start = usize::from(has_header);
    let idx = match column {
        Some(name) => {
            if !has_header {
                return Err(HurstError::Parse {
                    row: 1,
                    message: format!("no header row to look up column `{name}`"),
                });
            }
            first
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| HurstError::Parse {
                    row: 1,
                    message: format!("column `{name}` not in header"),
                })?
        }
        None => records
            .get(data_start)
            .and_then(|r| r.iter().position(|f| f.parse::<f64>().is_ok()))
            .ok_or_else(|| HurstError::Parse {
                row: data_start + 1,
                message: "no numeric column".into(),
            })?,
    };
    records[data_start..]
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let row = data_start + i + 1;
            let field = rec.get(idx).unwrap_or("");
            let v: f64 = field.parse().map_err(|_| HurstError::Parse {
                row,
                message: format!("`{field}` is not a number"),
            })?;
            finite(row, v)
        })
        .collect()
}

/// First 64 bits of the SHA-256 of `bytes`, as 16 hex digits.
pub fn content_digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash[..8]
        .iter()
        .fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Digest of the sample values themselves (little-endian f64), independent
/// of the file format they came from.
pub fn signal_digest(signal: &Signal) -> String {
    let bytes: Vec<u8> = signal
        .samples()
        .iter()
        .flat_map(|v| v.to_le_bytes())
        .collect();
    content_digest(&bytes)
}

/// Write through a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| HurstError::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleEncoding {
    Text,
    Bin,
}

pub fn encode_samples(samples: &[f64], encoding: SampleEncoding) -> Vec<u8> {
    match encoding {
        SampleEncoding::Bin => samples.iter().flat_map(|v| v.to_le_bytes()).collect(),
        SampleEncoding::Text => {
            let mut s = String::with_capacity(samples.len() * 22);
            for v in samples {
                let _ = writeln!(s, "{v:?}");
            }
            s.into_bytes()
        }
    }
}

pub fn write_signal(path: &Path, signal: &Signal, encoding: SampleEncoding) -> Result<()> {
    write_atomic(path, &encode_samples(signal.samples(), encoding))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: PathBuf,
    pub digest: String,
}

/// Provenance record attached to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub version: String,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub wall_clock_seconds: Option<f64>,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    /// Absolute paths among `args` (also inside `--flag=value`) are reduced
    /// to their file names.
    pub fn new(args: &[String], config: serde_json::Value) -> Self {
        RunManifest {
            command: args.iter().map(|a| sanitize_arg(a)).collect(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: chrono::Utc::now().to_rfc3339(),
            finished_at: None,
            wall_clock_seconds: None,
            inputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path, signal: &Signal) {
        self.inputs.push(InputDigest {
            name: portable_name(path),
            digest: signal_digest(signal),
        });
    }

    pub fn finish(&mut self, seconds: f64) {
        self.finished_at = Some(chrono::Utc::now().to_rfc3339());
        self.wall_clock_seconds = Some(seconds);
    }
}

fn sanitize_arg(arg: &str) -> String {
    let strip = |s: &str| {
        let p = Path::new(s);
        if p.is_absolute() {
            portable_name(p).to_string_lossy().into_owned()
        } else {
            s.to_string()
        }
    };
    match arg.split_once('=') {
        Some((flag, value)) if flag.starts_with("--") => format!("{flag}={}", strip(value)),
        _ => strip(arg),
    }
}

/// Serializable view of a decomposition, levels keyed by `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub mode: String,
    pub wavelet: String,
    pub n: usize,
    pub depth: usize,
    pub j_max: usize,
    pub levels: BTreeMap<i32, LevelDoc>,
    pub coarse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub scale: usize,
    pub coefficients: Vec<f64>,
}

impl DecompositionDoc {
    pub fn from_ndwt(d: &NdwtDecomposition) -> Self {
        let levels = (1..=d.depth())
            .map(|s| {
                let doc = LevelDoc {
                    scale: s,
                    coefficients: d.detail_at_scale(s).expect("s in range").to_vec(),
                };
                (d.level_of(s), doc)
            })
            .collect();
        DecompositionDoc {
            mode: "ndwt".into(),
            wavelet: d.filter().name.clone(),
            n: d.n(),
            depth: d.depth(),
            j_max: d.j_max(),
            levels,
            coarse: d.coarse().to_vec(),
        }
    }

    pub fn from_dwt(d: &DwtDecomposition, wavelet: &str) -> Self {
        let levels = (1..=d.depth())
            .map(|s| {
                let doc = LevelDoc {
                    scale: s,
                    coefficients: d.detail_at_scale(s).expect("s in range").to_vec(),
                };
                (d.level_of(s), doc)
            })
            .collect();
        DecompositionDoc {
            mode: "dwt".into(),
            wavelet: wavelet.to_string(),
            n: d.n(),
            depth: d.depth(),
            j_max: d.j_max(),
            levels,
            coarse: d.coarse().to_vec(),
        }
    }
}

/// Anything `write_report` knows how to persist.
#[derive(Debug, Clone, Copy)]
pub enum Payload<'a> {
    Estimates(&'a [HurstEstimate]),
    Simulation(&'a SimulationReport),
    Decomposition(&'a DecompositionDoc),
    Acf(&'a [f64]),
    QuantilePairs(&'a [QqPoint]),
    /// Free-form JSON document (theory tables, diagnostics bundles).
    Document(&'a serde_json::Value),
}

impl Payload<'_> {
    fn kind(&self) -> &'static str {
        match self {
            Payload::Estimates(_) => "hurst_estimates",
            Payload::Simulation(_) => "simulation_report",
            Payload::Decomposition(_) => "decomposition",
            Payload::Acf(_) => "acf",
            Payload::QuantilePairs(_) => "qq",
            Payload::Document(_) => "document",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(HurstError::InvalidParameter(format!(
                "unknown report format `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub kind: String,
    pub level_convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
    pub payload: T,
}

/// Render a payload. JSON embeds the manifest; CSV does not.
pub fn render_report(
    payload: Payload<'_>,
    format: ReportFormat,
    manifest: Option<&RunManifest>,
) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let body = match payload {
                Payload::Estimates(e) => serde_json::to_value(e)?,
                Payload::Simulation(r) => serde_json::to_value(r)?,
                Payload::Decomposition(d) => serde_json::to_value(d)?,
                Payload::Acf(r) => serde_json::to_value(r)?,
                Payload::QuantilePairs(q) => serde_json::to_value(q)?,
                Payload::Document(v) => v.clone(),
            };
            let env = Envelope {
                schema_version: SCHEMA_VERSION,
                kind: payload.kind().into(),
                level_convention: LEVEL_CONVENTION.into(),
                manifest: manifest.cloned(),
                payload: body,
            };
            let mut s = serde_json::to_string_pretty(&env)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => match payload {
            Payload::Estimates(e) => Ok(spectrum_csv(e)),
            Payload::Simulation(r) => Ok(table_csv(r)),
            Payload::Acf(r) => Ok(acf_csv(r)),
            Payload::QuantilePairs(q) => Ok(qq_csv(q)),
            other => Err(HurstError::UnsupportedFormat {
                format: "csv".into(),
                payload: other.kind().into(),
            }),
        },
    }
}

/// Write a payload atomically. With CSV, a manifest is written next to the
/// table as `<file>.manifest.json`.
pub fn write_report(
    payload: Payload<'_>,
    path: &Path,
    format: ReportFormat,
    manifest: Option<&RunManifest>,
) -> Result<()> {
    let body = render_report(payload, format, manifest)?;
    write_atomic(path, body.as_bytes())?;
    if let (ReportFormat::Csv, Some(m)) = (format, manifest) {
        write_manifest_sidecar(path, m)?;
    }
    Ok(())
}

pub fn write_manifest_sidecar(path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    let mut s = serde_json::to_string_pretty(manifest)?;
    s.push('\n');
    write_atomic(Path::new(&name), s.as_bytes())
}

/// Read the payload of a JSON envelope back.
pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<Envelope<T>> {
    let bytes = read_bytes(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn spectrum_csv(estimates: &[HurstEstimate]) -> String {
    let mut s = String::from("method,j,scale,y,n_j\n");
    for e in estimates {
        for p in &e.points {
            let scale = p.scale.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{:?},{}",
                e.method.label(),
                p.j,
                scale,
                p.y,
                p.n_j
            );
        }
    }
    s
}

pub fn acf_csv(r: &[f64]) -> String {
    let mut s = String::from("lag,acf\n");
    for (h, v) in r.iter().enumerate() {
        let _ = writeln!(s, "{h},{v:?}");
    }
    s
}

pub fn qq_csv(points: &[QqPoint]) -> String {
    let mut s = String::from("theoretical,empirical\n");
    for p in points {
        let _ = writeln!(s, "{:?},{:?}", p.theoretical, p.empirical);
    }
    s
}

type CellStat = fn(&crate::simharness::CellSummary) -> f64;

/// One block per H: rows Mean / Variance / Bias-squared / MSE, one column
/// per method in Traditional, Soltani, MEDL, MEDLA order.
pub fn table_csv(report: &SimulationReport) -> String {
    let mut methods: Vec<_> = report.cells.iter().map(|c| c.method).collect();
    methods.sort();
    methods.dedup();
    let mut s = String::from("H,Statistic");
    for m in &methods {
        let _ = write!(s, ",{}", m.label());
    }
    s.push('\n');
    for &h in &report.config.hursts {
        let rows: [(&str, CellStat); 4] = [
            ("Mean", |c| c.mean),
            ("Variance", |c| c.variance),
            ("Bias-squared", |c| c.bias_squared),
            ("MSE", |c| c.mse),
        ];
        for (label, get) in rows {
            let _ = write!(s, "{h},{label}");
            for &m in &methods {
                match report.cell(h, m) {
                    Some(c) => {
                        let _ = write!(s, ",{:.6e}", get(c));
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
    }
    s
}
