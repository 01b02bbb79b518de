//! Command-line interface over the planscore engine: validate and extract
//! single plans, score submissions, run batch evaluations, generate
//! synthetic plans, and print leaderboards.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/IO error, 3 operation
//! failure (e.g. an unsatisfiable generator config).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use planscore::graph::{FloorPlanIr, RuleViolation};
use planscore::harness::{
    self, parse_raster_size, HarnessError, ResultRecord, ScoreOptions,
};
use planscore::raster::{load_image_with_meta, PixelGrid};
use planscore::scorer::ScoreBreakdown;
use planscore::svg;
use planscore::synth::{self, PerturbOp, SynthConfig, SynthError, SynthPlan};
use planscore::validate::{transparency_violation, validate};

#[derive(Parser)]
#[command(
    name = "planscore",
    version,
    about = "Floor-plan similarity scoring and synthetic plan generation",
    after_help = "Defaults can be overridden by PLANSCORE_TOLERANCE (color \
                  tolerance, 0-255, default 48) and PLANSCORE_RASTER_SIZE \
                  (N or WxH, default 1000x1000); command-line flags win over \
                  the environment."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a plan image against the drawing rules
    Validate {
        /// Plan file (SVG or raster image)
        image: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        opts: OptionFlags,
    },
    /// Extract the room-connectivity record from a plan image
    Extract {
        /// Plan file (SVG or raster image)
        image: PathBuf,
        /// Write the record here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: OptionFlags,
    },
    /// Score a candidate plan against a ground-truth plan
    Score {
        candidate: PathBuf,
        truth: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        opts: OptionFlags,
    },
    /// Score every submission under a directory tree
    Batch {
        /// Dataset manifest (TOML)
        manifest: PathBuf,
        /// Submissions root laid out as <submitter>/<apartment>/<epoch>.<ext>
        submissions: PathBuf,
        /// Number of epochs to scan (indices 0..k)
        #[arg(long, default_value_t = 1)]
        epochs: u32,
        /// Run file that records are appended to
        #[arg(long, default_value = "run.jsonl")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        opts: OptionFlags,
    },
    /// Generate synthetic plans
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Aggregate a run file into a leaderboard
    Report {
        run_file: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Generate a rule-compliant plan from a seed
    Gen {
        #[command(flatten)]
        config: ConfigFlags,
        /// Write the rendered raster here
        #[arg(long)]
        png: Option<PathBuf>,
        /// Write the vector rendering here
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the ground-truth record here (stdout if no output is given)
        #[arg(long)]
        ir: Option<PathBuf>,
    },
    /// Generate a plan, then damage it in a controlled way
    Perturb {
        /// What to damage
        #[arg(value_enum)]
        op: OpArg,
        #[command(flatten)]
        config: ConfigFlags,
        /// Seed for the perturbation choice itself
        #[arg(long, default_value_t = 0)]
        perturb_seed: u64,
        /// For remove-door: only remove doors that keep the plan connected
        #[arg(long)]
        keep_connected: bool,
        /// Write the perturbed raster here
        #[arg(long)]
        png: Option<PathBuf>,
        /// Write the perturbed ground-truth record here (stdout if no output)
        #[arg(long)]
        ir: Option<PathBuf>,
    },
    /// Emit the connectivity record of a random plan (the no-input baseline)
    Baseline {
        #[command(flatten)]
        config: ConfigFlags,
        /// Write the record here instead of stdout
        #[arg(long)]
        ir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    RemoveDoor,
    AddDoor,
    SwapRanks,
    PunchGap,
    DeleteDot,
    OffPaletteSpeck,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

/// Scoring tunables; flags beat environment variables, which beat defaults.
#[derive(Args)]
struct OptionFlags {
    /// Color classification tolerance, 0-255
    #[arg(long)]
    tolerance: Option<u8>,
    /// Raster size for vector inputs: N or WxH
    #[arg(long)]
    raster_size: Option<String>,
}

impl OptionFlags {
    /// Flag, else environment variable, else default — per knob, so a flag
    /// shadows its environment variable entirely (even a malformed one).
    fn resolve(&self) -> Result<ScoreOptions, CliError> {
        let mut options = ScoreOptions::default();
        options.tolerance = match self.tolerance {
            Some(t) => t,
            None => harness::env_tolerance()?.unwrap_or(options.tolerance),
        };
        options.raster_size = match &self.raster_size {
            Some(raw) => parse_raster_size(raw).ok_or_else(|| {
                CliError::Usage(format!("--raster-size must be N or WxH, got {raw:?}"))
            })?,
            None => harness::env_raster_size()?.unwrap_or(options.raster_size),
        };
        Ok(options)
    }
}

/// Generator knobs mirroring `SynthConfig`.
#[derive(Args)]
struct ConfigFlags {
    /// Generation seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Room count: MIN-MAX or a single count
    #[arg(long, default_value = "3-6")]
    rooms: String,
    /// Canvas size: N or WxH
    #[arg(long, default_value = "1000x1000")]
    canvas: String,
    /// Wall stroke width (odd)
    #[arg(long, default_value_t = 3)]
    wall_width: u32,
    /// Door length in pixels
    #[arg(long, default_value_t = 24)]
    door_length: u32,
    /// Room marker side length
    #[arg(long, default_value_t = 10)]
    dot_size: u32,
    /// Probability of doors beyond the spanning tree
    #[arg(long, default_value_t = 0.25)]
    extra_door_prob: f64,
    /// Minimum pairwise relative room-area difference
    #[arg(long, default_value_t = 0.02)]
    area_margin: f64,
}

impl ConfigFlags {
    fn to_config(&self) -> Result<SynthConfig, CliError> {
        let room_range = parse_range(&self.rooms).ok_or_else(|| {
            CliError::Usage(format!("--rooms must be MIN-MAX or N, got {:?}", self.rooms))
        })?;
        let canvas = parse_raster_size(&self.canvas).ok_or_else(|| {
            CliError::Usage(format!("--canvas must be N or WxH, got {:?}", self.canvas))
        })?;
        Ok(SynthConfig {
            room_range,
            canvas,
            wall_width: self.wall_width,
            door_length: self.door_length,
            dot_size: self.dot_size,
            extra_door_prob: self.extra_door_prob,
            min_area_margin: self.area_margin,
            seed: self.seed,
        })
    }
}

fn parse_range(raw: &str) -> Option<(u32, u32)> {
    let raw = raw.trim();
    match raw.split_once('-') {
        Some((lo, hi)) => Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?)),
        None => {
            let n: u32 = raw.parse().ok()?;
            Some((n, n))
        }
    }
}

/// Failures sorted by their exit code.
enum CliError {
    /// Bad flags or values: exit 1.
    Usage(String),
    /// Unreadable or unusable input files: exit 2.
    Io(String),
    /// The operation itself failed: exit 3.
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Options(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if ok { 0 } else { 1 });
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}

/// Prints one blob to stdout, exiting quietly when the reader has closed
/// the pipe (e.g. `planscore extract plan.png | head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let result = out
        .write_all(text.as_bytes())
        .and_then(|()| out.write_all(b"\n"))
        .and_then(|()| out.flush());
    if let Err(e) = result {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(2);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate {
            image,
            format,
            opts,
        } => cmd_validate(&image, format, &opts.resolve()?),
        Command::Extract { image, out, opts } => cmd_extract(&image, out.as_deref(), &opts.resolve()?),
        Command::Score {
            candidate,
            truth,
            format,
            opts,
        } => cmd_score(&candidate, &truth, format, &opts.resolve()?),
        Command::Batch {
            manifest,
            submissions,
            epochs,
            out,
            format,
            opts,
        } => cmd_batch(&manifest, &submissions, epochs, &out, format, &opts.resolve()?),
        Command::Synth(synth) => cmd_synth(synth),
        Command::Report { run_file, format } => cmd_report(&run_file, format),
    }
}

/// Loads either input kind into a classified grid, collecting SVG parse
/// issues and container-level violations along the way.
fn load_grid(
    path: &Path,
    options: &ScoreOptions,
) -> Result<(PixelGrid, Vec<String>, Vec<RuleViolation>), CliError> {
    let is_svg = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.eq_ignore_ascii_case("svg"),
        None => fs::read(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?
            .iter()
            .find(|b| !b.is_ascii_whitespace())
            .is_some_and(|&b| b == b'<'),
    };
    if is_svg {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let outcome = svg::parse_svg(&text)
            .map_err(|e| CliError::Io(format!("cannot parse {}: {e}", path.display())))?;
        let grid = svg::rasterize(&outcome.plan, options.raster_size.0, options.raster_size.1);
        let issues = outcome.issues.iter().map(|i| i.to_string()).collect();
        Ok((grid, issues, Vec::new()))
    } else {
        let (grid, meta) = load_image_with_meta(path, options.tolerance)
            .map_err(|e| CliError::Io(e.to_string()))?;
        let extra = transparency_violation(&meta).into_iter().collect();
        Ok((grid, Vec::new(), extra))
    }
}

fn cmd_validate(image: &Path, format: Format, options: &ScoreOptions) -> Result<(), CliError> {
    let (grid, issues, extra) = load_grid(image, options)?;
    let mut violations = validate(&grid);
    violations.extend(extra);
    violations.sort_by(|a, b| (a.rule, &a.location, &a.description).cmp(&(b.rule, &b.location, &b.description)));
    match format {
        Format::Json => {
            let body = serde_json::json!({
                "issues": issues,
                "violations": violations,
            });
            emit(&serde_json::to_string_pretty(&body).expect("serializable"));
        }
        Format::Text => {
            let mut lines: Vec<String> = issues.iter().map(|i| format!("note: {i}")).collect();
            if violations.is_empty() {
                lines.push("no violations found".into());
            } else {
                lines.extend(violations.iter().map(|v| v.to_string()));
            }
            emit(&lines.join("\n"));
        }
    }
    Ok(())
}

fn cmd_extract(image: &Path, out: Option<&Path>, options: &ScoreOptions) -> Result<(), CliError> {
    let (grid, _, extra) = load_grid(image, options)?;
    let mut ir = planscore::extract::extract(&grid);
    ir.violations.extend(extra);
    ir.canonicalize();
    let json = ir.to_json();
    match out {
        Some(path) => fs::write(path, json.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => emit(&json),
    }
    Ok(())
}

fn breakdown_text(b: &ScoreBreakdown) -> String {
    format!(
        "edge_overlap     {:.4}\n\
         degree_corr      {:.4}\n\
         density_sim      {:.4}\n\
         room_count_sim   {:.4}\n\
         door_count_sim   {:.4}\n\
         orientation_sim  {:.4}\n\
         composite        {:.4}",
        b.edge_overlap,
        b.degree_corr,
        b.density_sim,
        b.room_count_sim,
        b.door_count_sim,
        b.orientation_sim,
        b.composite,
    )
}

fn cmd_score(
    candidate: &Path,
    truth: &Path,
    format: Format,
    options: &ScoreOptions,
) -> Result<(), CliError> {
    let record = harness::score_submission(candidate, truth, options)?;
    match format {
        Format::Json => emit(&serde_json::to_string_pretty(&record).expect("serializable")),
        Format::Text => {
            let mut text = breakdown_text(&record.breakdown);
            text.push_str(&format!("\nviolations       {}", record.violations));
            if let Some(reason) = &record.failure {
                text.push_str(&format!("\nfailure          {reason}"));
            }
            emit(&text);
        }
    }
    Ok(())
}

fn cmd_batch(
    manifest: &Path,
    submissions: &Path,
    epochs: u32,
    out: &Path,
    format: Format,
    options: &ScoreOptions,
) -> Result<(), CliError> {
    let outcome = harness::batch_score(manifest, submissions, epochs, options)?;
    harness::write_run_file(out, &outcome.records)?;
    match format {
        Format::Json => {
            let body = serde_json::json!({
                "scored": outcome.records.len(),
                "skipped": outcome.skipped,
                "run_file": out,
            });
            emit(&serde_json::to_string_pretty(&body).expect("serializable"));
        }
        Format::Text => {
            let mut text = format!(
                "scored {} submission(s), {} missing; records appended to {}",
                outcome.records.len(),
                outcome.skipped.len(),
                out.display()
            );
            for s in &outcome.skipped {
                text.push_str(&format!("\nmissing: {s}"));
            }
            emit(&text);
        }
    }
    Ok(())
}

fn write_ir(ir: &FloorPlanIr, out: Option<&Path>) -> Result<(), CliError> {
    let json = ir.to_json();
    match out {
        Some(path) => fs::write(path, json.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            emit(&json);
            Ok(())
        }
    }
}

fn write_plan_outputs(
    plan: &SynthPlan,
    png: Option<&Path>,
    svg_out: Option<&Path>,
    ir: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(path) = png {
        plan.raster
            .to_rgb_image()
            .save(path)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = svg_out {
        fs::write(path, synth::render_to_svg(plan))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    // The record goes to stdout when nothing else was requested, or to
    // --ir when given.
    if (png.is_none() && svg_out.is_none()) || ir.is_some() {
        write_ir(&plan.truth, ir)?;
    }
    Ok(())
}

fn cmd_synth(command: SynthCommand) -> Result<(), CliError> {
    match command {
        SynthCommand::Gen {
            config,
            png,
            svg: svg_out,
            ir,
        } => {
            let plan = synth::generate(&config.to_config()?)?;
            write_plan_outputs(&plan, png.as_deref(), svg_out.as_deref(), ir.as_deref())
        }
        SynthCommand::Perturb {
            op,
            config,
            perturb_seed,
            keep_connected,
            png,
            ir,
        } => {
            let plan = synth::generate(&config.to_config()?)?;
            let op = match op {
                OpArg::RemoveDoor => PerturbOp::RemoveDoor { keep_connected },
                OpArg::AddDoor => PerturbOp::AddDoor,
                OpArg::SwapRanks => PerturbOp::SwapRanks,
                OpArg::PunchGap => PerturbOp::PunchGap,
                OpArg::DeleteDot => PerturbOp::DeleteDot,
                OpArg::OffPaletteSpeck => PerturbOp::OffPaletteSpeck,
            };
            let out = synth::perturb(&plan, op, perturb_seed)?;
            write_plan_outputs(&out, png.as_deref(), None, ir.as_deref())
        }
        SynthCommand::Baseline { config, ir } => {
            let config = config.to_config()?;
            let baseline = synth::random_baseline(&config, config.seed)?;
            write_ir(&baseline, ir.as_deref())
        }
    }
}

fn cmd_report(run_file: &Path, format: ReportFormat) -> Result<(), CliError> {
    let records: Vec<ResultRecord> = harness::read_run_file(run_file)?;
    let rows = harness::aggregate(&records);
    match format {
        ReportFormat::Json => emit(&serde_json::to_string_pretty(&rows).expect("serializable")),
        ReportFormat::Table => {
            let mut text = format!(
                "{:<16} {:>7} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
                "submitter", "samples", "mean", "std", "edge", "degree", "density", "rooms", "doors", "orient"
            );
            for row in &rows {
                text.push_str(&format!(
                    "\n{:<16} {:>7} {:>8.4} {:>8.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}",
                    row.submitter,
                    row.samples,
                    row.mean.composite,
                    row.std_composite,
                    row.mean.edge_overlap,
                    row.mean.degree_corr,
                    row.mean.density_sim,
                    row.mean.room_count_sim,
                    row.mean.door_count_sim,
                    row.mean.orientation_sim,
                ));
            }
            emit(&text);
        }
    }
    Ok(())
}
