//! Batch evaluation: dataset manifests, submission scoring, run files, and
//! leaderboard aggregation.
//!
//! A dataset is described by a TOML manifest listing apartments and their
//! ground-truth plans. Submissions live under
//! `<root>/<submitter>/<apartment>/<epoch>.<ext>` where the extension picks
//! the input kind (`svg` for vector plans; `png`/`jpg`/`jpeg`/`bmp` for
//! rasters). Scoring never excludes a submission: anything unreadable is
//! recorded with composite 0 and a failure reason.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::extract;
use crate::graph::FloorPlanIr;
use crate::raster::{load_image_with_meta, PixelGrid, DEFAULT_TOLERANCE};
use crate::scorer::{composite_score, ScoreBreakdown};
use crate::svg::{self, parse_svg, DEFAULT_CANVAS};
use crate::validate::transparency_violation;

/// Environment variable overriding the color-classification tolerance.
pub const ENV_TOLERANCE: &str = "PLANSCORE_TOLERANCE";
/// Environment variable overriding the rasterization size for vector
/// submissions; accepts `N` or `WxH`.
pub const ENV_RASTER_SIZE: &str = "PLANSCORE_RASTER_SIZE";

/// Raster extensions tried, in priority order, after `svg`.
const RASTER_EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "bmp"];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {detail}")]
    Manifest { path: PathBuf, detail: String },
    #[error("truth plan {path} is unusable: {detail}")]
    Truth { path: PathBuf, detail: String },
    #[error("invalid options: {0}")]
    Options(String),
    #[error("run file {path}, line {line}: {detail}")]
    RunFile {
        path: PathBuf,
        line: usize,
        detail: String,
    },
}

/// Tunables shared by every scoring call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Palette classification tolerance (Chebyshev distance).
    pub tolerance: u8,
    /// Output size vector submissions are rasterized to.
    pub raster_size: (u32, u32),
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            tolerance: DEFAULT_TOLERANCE,
            raster_size: DEFAULT_CANVAS,
        }
    }
}

impl ScoreOptions {
    /// Defaults overridden by `PLANSCORE_TOLERANCE` and
    /// `PLANSCORE_RASTER_SIZE` when set.
    pub fn from_env() -> Result<Self, HarnessError> {
        let mut options = ScoreOptions::default();
        if let Some(tolerance) = env_tolerance()? {
            options.tolerance = tolerance;
        }
        if let Some(size) = env_raster_size()? {
            options.raster_size = size;
        }
        Ok(options)
    }
}

/// [`ENV_TOLERANCE`] if set; `Ok(None)` when unset. Callers that have a
/// stronger source (say, a command-line flag) can skip consulting it.
pub fn env_tolerance() -> Result<Option<u8>, HarnessError> {
    match std::env::var(ENV_TOLERANCE) {
        Err(_) => Ok(None),
        Ok(raw) => raw.trim().parse().map(Some).map_err(|_| {
            HarnessError::Options(format!("{ENV_TOLERANCE} must be 0-255, got {raw:?}"))
        }),
    }
}

/// [`ENV_RASTER_SIZE`] if set; `Ok(None)` when unset.
pub fn env_raster_size() -> Result<Option<(u32, u32)>, HarnessError> {
    match std::env::var(ENV_RASTER_SIZE) {
        Err(_) => Ok(None),
        Ok(raw) => parse_raster_size(&raw).map(Some).ok_or_else(|| {
            HarnessError::Options(format!(
                "{ENV_RASTER_SIZE} must be N or WxH with positive dimensions, got {raw:?}"
            ))
        }),
    }
}

/// Parses `"800"` as a square or `"800x600"` as width by height.
pub fn parse_raster_size(raw: &str) -> Option<(u32, u32)> {
    let raw = raw.trim();
    let (w, h) = match raw.split_once(['x', 'X']) {
        Some((w, h)) => (w.trim().parse().ok()?, h.trim().parse().ok()?),
        None => {
            let n: u32 = raw.parse().ok()?;
            (n, n)
        }
    };
    (w > 0 && h > 0).then_some((w, h))
}

/// One apartment in the dataset manifest; paths are resolved relative to
/// the manifest file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApartmentEntry {
    pub id: String,
    pub truth: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photos: Option<PathBuf>,
}

/// Parsed dataset manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub apartments: Vec<ApartmentEntry>,
}

#[derive(Debug, Deserialize)]
struct RawManifest {
    version: u32,
    #[serde(default)]
    apartments: Vec<RawApartment>,
}

#[derive(Debug, Deserialize)]
struct RawApartment {
    id: String,
    truth: String,
    photos: Option<String>,
}

/// Loads and checks a manifest: version 1, unique ids, paths resolved
/// against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Manifest, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: RawManifest = toml::from_str(&text).map_err(|e| HarnessError::Manifest {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    if raw.version != 1 {
        return Err(HarnessError::Manifest {
            path: path.to_path_buf(),
            detail: format!("unsupported manifest version {}", raw.version),
        });
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut seen = std::collections::BTreeSet::new();
    let mut apartments = Vec::with_capacity(raw.apartments.len());
    for apt in raw.apartments {
        if !seen.insert(apt.id.clone()) {
            return Err(HarnessError::Manifest {
                path: path.to_path_buf(),
                detail: format!("duplicate apartment id {:?}", apt.id),
            });
        }
        apartments.push(ApartmentEntry {
            id: apt.id,
            truth: base.join(apt.truth),
            photos: apt.photos.map(|p| base.join(p)),
        });
    }
    Ok(Manifest { apartments })
}

/// One scored (submitter, apartment, epoch) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub submitter: String,
    pub apartment: String,
    pub epoch: u32,
    pub breakdown: ScoreBreakdown,
    /// Rule violations found on the submission side.
    pub violations: usize,
    /// Why the submission scored 0, when it could not be processed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Wall-clock scoring time, milliseconds since the Unix epoch.
    pub unix_ms: u64,
}

/// Aggregated standings for one submitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub submitter: String,
    pub samples: usize,
    /// Field-wise means; `mean.composite` is the headline score.
    pub mean: ScoreBreakdown,
    /// Sample standard deviation of the composite (0 for one sample).
    pub std_composite: f64,
}

/// Everything batch scoring produced: records in deterministic order plus
/// notes for the triples that had no submission file.
#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub records: Vec<ResultRecord>,
    pub skipped: Vec<String>,
}

/// A plan loaded for scoring, or the reason it could not be.
enum LoadedPlan {
    Ok(FloorPlanIr),
    Failed(String),
}

/// Reads a submission of either kind and extracts its IR. Never errors:
/// problems become the failure string.
fn load_plan(path: &Path, options: &ScoreOptions) -> LoadedPlan {
    match load_grid(path, options) {
        Ok((grid, extra)) => {
            let mut ir = extract(&grid);
            ir.violations.extend(extra);
            ir.canonicalize();
            LoadedPlan::Ok(ir)
        }
        Err(reason) => LoadedPlan::Failed(reason),
    }
}

/// Classified raster for a submission file, plus any violations that only
/// the container format can reveal (background transparency).
fn load_grid(
    path: &Path,
    options: &ScoreOptions,
) -> Result<(PixelGrid, Vec<crate::graph::RuleViolation>), String> {
    if is_vector(path)? {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read: {e}"))?;
        let outcome = parse_svg(&text).map_err(|e| format!("cannot parse: {e}"))?;
        let grid = svg::rasterize(&outcome.plan, options.raster_size.0, options.raster_size.1);
        Ok((grid, Vec::new()))
    } else {
        let (grid, meta) =
            load_image_with_meta(path, options.tolerance).map_err(|e| e.to_string())?;
        let extra = transparency_violation(&meta).into_iter().collect();
        Ok((grid, extra))
    }
}

/// Extension decides the kind; unknown extensions are sniffed by their
/// first non-whitespace byte (`<` means markup).
fn is_vector(path: &Path) -> Result<bool, String> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("svg") => return Ok(true),
        Some(e) if RASTER_EXTENSIONS.contains(&e) => return Ok(false),
        _ => {}
    }
    let bytes = fs::read(path).map_err(|e| format!("cannot read: {e}"))?;
    Ok(bytes
        .iter()
        .find(|b| !b.is_ascii_whitespace())
        .is_some_and(|&b| b == b'<'))
}

/// Loads a ground-truth plan, failing hard — a broken dataset must not be
/// silently scored around.
pub fn load_truth(path: &Path, options: &ScoreOptions) -> Result<FloorPlanIr, HarnessError> {
    match load_plan(path, options) {
        LoadedPlan::Ok(ir) => Ok(ir),
        LoadedPlan::Failed(detail) => Err(HarnessError::Truth {
            path: path.to_path_buf(),
            detail,
        }),
    }
}

fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Scores one submission against an already-extracted truth IR.
fn score_against_truth(
    submission: &Path,
    truth: &FloorPlanIr,
    options: &ScoreOptions,
) -> (ScoreBreakdown, usize, Option<String>) {
    match load_plan(submission, options) {
        LoadedPlan::Ok(candidate) => (
            composite_score(&candidate, truth),
            candidate.violations.len(),
            None,
        ),
        LoadedPlan::Failed(reason) => (ScoreBreakdown::zero(), 0, Some(reason)),
    }
}

/// Scores a single submission file against a truth file. The identity
/// fields of the record are left blank; batch scoring fills them in.
pub fn score_submission(
    submission: &Path,
    truth: &Path,
    options: &ScoreOptions,
) -> Result<ResultRecord, HarnessError> {
    let truth_ir = load_truth(truth, options)?;
    let (breakdown, violations, failure) = score_against_truth(submission, &truth_ir, options);
    Ok(ResultRecord {
        submitter: String::new(),
        apartment: String::new(),
        epoch: 0,
        breakdown,
        violations,
        failure,
        unix_ms: now_unix_ms(),
    })
}

/// Scores every (submitter, apartment, epoch) file present under the
/// submissions root, in deterministic (submitter, apartment, epoch) order.
/// Epochs are 0-based: epoch indices `0..epochs` are scanned.
pub fn batch_score(
    manifest_path: &Path,
    submissions_root: &Path,
    epochs: u32,
    options: &ScoreOptions,
) -> Result<BatchOutcome, HarnessError> {
    let manifest = load_manifest(manifest_path)?;
    let mut apartments = manifest.apartments;
    apartments.sort_by(|a, b| a.id.cmp(&b.id));

    let mut submitters = Vec::new();
    let entries = fs::read_dir(submissions_root).map_err(|source| HarnessError::Io {
        path: submissions_root.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| HarnessError::Io {
            path: submissions_root.to_path_buf(),
            source,
        })?;
        if entry.path().is_dir() {
            submitters.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    submitters.sort();

    let mut truths: BTreeMap<String, FloorPlanIr> = BTreeMap::new();
    for apt in &apartments {
        let ir = load_truth(&apt.truth, options)?;
        truths.insert(apt.id.clone(), ir);
    }

    let mut outcome = BatchOutcome {
        records: Vec::new(),
        skipped: Vec::new(),
    };
    for submitter in &submitters {
        for apt in &apartments {
            for epoch in 0..epochs {
                let dir = submissions_root.join(submitter).join(&apt.id);
                let Some(file) = find_submission(&dir, epoch) else {
                    outcome
                        .skipped
                        .push(format!("{submitter}/{}/{epoch}", apt.id));
                    continue;
                };
                let truth = &truths[&apt.id];
                let (breakdown, violations, failure) =
                    score_against_truth(&file, truth, options);
                outcome.records.push(ResultRecord {
                    submitter: submitter.clone(),
                    apartment: apt.id.clone(),
                    epoch,
                    breakdown,
                    violations,
                    failure,
                    unix_ms: now_unix_ms(),
                });
            }
        }
    }
    Ok(outcome)
}

/// First existing `<epoch>.<ext>` in the extension priority order.
fn find_submission(dir: &Path, epoch: u32) -> Option<PathBuf> {
    std::iter::once("svg")
        .chain(RASTER_EXTENSIONS)
        .map(|ext| dir.join(format!("{epoch}.{ext}")))
        .find(|p| p.is_file())
}

/// Appends records to a line-delimited run file, one JSON record per line.
pub fn write_run_file(path: &Path, records: &[ResultRecord]) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_err)?;
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(file, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Reads a run file written by [`write_run_file`].
pub fn read_run_file(path: &Path) -> Result<Vec<ResultRecord>, HarnessError> {
    let file = fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| HarnessError::RunFile {
            path: path.to_path_buf(),
            line: index + 1,
            detail: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Groups records by submitter: mean breakdown, sample standard deviation
/// of the composite, and sample counts. Rows sort by mean composite
/// descending, ties by submitter name.
pub fn aggregate(records: &[ResultRecord]) -> Vec<LeaderboardRow> {
    let mut groups: BTreeMap<&str, Vec<&ResultRecord>> = BTreeMap::new();
    for record in records {
        groups.entry(&record.submitter).or_default().push(record);
    }
    let mut rows: Vec<LeaderboardRow> = groups
        .into_iter()
        .map(|(submitter, group)| {
            let n = group.len() as f64;
            let mean_of = |f: fn(&ScoreBreakdown) -> f64| {
                group.iter().map(|r| f(&r.breakdown)).sum::<f64>() / n
            };
            let mean_composite = mean_of(|b| b.composite);
            let variance = if group.len() < 2 {
                0.0
            } else {
                group
                    .iter()
                    .map(|r| {
                        let d = r.breakdown.composite - mean_composite;
                        d * d
                    })
                    .sum::<f64>()
                    / (n - 1.0)
            };
            LeaderboardRow {
                submitter: submitter.to_string(),
                samples: group.len(),
                mean: ScoreBreakdown {
                    edge_overlap: mean_of(|b| b.edge_overlap),
                    degree_corr: mean_of(|b| b.degree_corr),
                    density_sim: mean_of(|b| b.density_sim),
                    room_count_sim: mean_of(|b| b.room_count_sim),
                    door_count_sim: mean_of(|b| b.door_count_sim),
                    orientation_sim: mean_of(|b| b.orientation_sim),
                    composite: mean_composite,
                },
                std_composite: variance.sqrt(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.mean
            .composite
            .partial_cmp(&a.mean.composite)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.submitter.cmp(&b.submitter))
    });
    rows
}
