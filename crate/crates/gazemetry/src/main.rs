//! Command-line entry point. Subcommands: analyze, synth, validate-config,
//! version. Diagnostics go to stderr; stdout carries only report data
//! (in `--pipe` mode, exactly the structured report).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gazemetry::analyze::{cmd_analyze, AnalyzeRequest};
use gazemetry::config::EffectiveConfig;
use gazemetry::error::{exit_code, CliError};
use gazemetry::report_io::Formats;
use gazemetry::synth_cmd::{cmd_synth, SynthRequest};
use gazemetry_core::report::render_json;

const CONFIG_ENV_VAR: &str = "GAZEMETRY_CONFIG";

#[derive(Parser)]
#[command(
    name = "gazemetry",
    version,
    about = "Gaze analytics for sorting-game eye-tracking sessions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a session file (or a directory of them) into reports.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic session with a ground-truth sidecar.
    Synth(SynthArgs),
    /// Check a config file and print the effective configuration.
    ValidateConfig(ValidateArgs),
    /// Print the tool version.
    Version,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Config file (key=value); defaults to $GAZEMETRY_CONFIG if set.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Screen width in pixels.
    #[arg(long)]
    screen_width: Option<u32>,
    /// Screen height in pixels.
    #[arg(long)]
    screen_height: Option<u32>,
    /// Vertical origin of the source log: top or bottom.
    #[arg(long)]
    y_origin: Option<String>,
    /// AOI lookup tolerance in pixels.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Minimum AOI size in pixels.
    #[arg(long)]
    min_aoi_size: Option<f64>,
    /// Coordinate interpretation: auto, normalized, or pixel.
    #[arg(long)]
    coords: Option<String>,
    /// Basic I-VT velocity threshold, px/s.
    #[arg(long)]
    v_basic: Option<f64>,
    /// Clustering velocity threshold, px/s.
    #[arg(long)]
    v_advanced: Option<f64>,
    /// Cluster spatial threshold, px.
    #[arg(long)]
    spatial_threshold: Option<f64>,
    /// Minimum fixation duration, ms.
    #[arg(long)]
    min_duration: Option<u64>,
    /// Minimum samples per fixation cluster.
    #[arg(long)]
    min_cluster_size: Option<usize>,
    /// Minimum target-to-click latency, ms.
    #[arg(long)]
    min_latency: Option<u64>,
    /// Maximum target-to-click latency, ms.
    #[arg(long)]
    max_latency: Option<u64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<EffectiveConfig, CliError> {
        let mut cfg = EffectiveConfig::default();
        let file = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from));
        if let Some(path) = file {
            cfg.apply_file(&path)?;
        }
        let mut set = |key: &str, value: Option<String>| -> Result<(), CliError> {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(CliError::Config)?;
            }
            Ok(())
        };
        set("screen.width", self.screen_width.map(|v| v.to_string()))?;
        set("screen.height", self.screen_height.map(|v| v.to_string()))?;
        set("screen.y_origin", self.y_origin.clone())?;
        set("aoi.tolerance", self.tolerance.map(|v| v.to_string()))?;
        set("aoi.min_size", self.min_aoi_size.map(|v| v.to_string()))?;
        set("coords", self.coords.clone())?;
        set("detect.v_basic", self.v_basic.map(|v| v.to_string()))?;
        set("detect.v_advanced", self.v_advanced.map(|v| v.to_string()))?;
        set(
            "detect.spatial_threshold",
            self.spatial_threshold.map(|v| v.to_string()),
        )?;
        set("detect.min_duration_ms", self.min_duration.map(|v| v.to_string()))?;
        set(
            "detect.min_cluster_size",
            self.min_cluster_size.map(|v| v.to_string()),
        )?;
        set("match.min_latency_ms", self.min_latency.map(|v| v.to_string()))?;
        set("match.max_latency_ms", self.max_latency.map(|v| v.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Session file, or a directory of session files (batch mode).
    #[arg(long)]
    input: PathBuf,
    /// AOI sidecar file; overrides inline AOI definitions.
    #[arg(long)]
    aoi: Option<PathBuf>,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated outputs: json, md, plots, or all.
    #[arg(long, default_value = "all")]
    formats: String,
    /// Student id for the report; defaults to the input file stem.
    #[arg(long)]
    student_id: Option<String>,
    /// Also write per-sample velocity/label/cluster dumps.
    #[arg(long)]
    dump_labels: bool,
    /// Print the structured report to stdout and nothing else.
    #[arg(long)]
    pipe: bool,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Synth spec file; omit to use the built-in demo spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output session file (canonical CSV).
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth sidecar path; defaults to <out>.truth.txt.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Analyze(args) => {
            let cfg = args.config.build()?;
            let formats = Formats::parse(&args.formats).map_err(CliError::Config)?;
            let request = AnalyzeRequest {
                input: args.input,
                aoi_path: args.aoi,
                out_dir: args.out,
                formats,
                student_id: args.student_id,
                dump_labels: args.dump_labels,
                pipe: args.pipe,
            };
            let summary = cmd_analyze(&request, &cfg)?;
            let mut first_error: Option<i32> = None;
            let mut any_ok = false;
            for (student, result) in &summary.students {
                match result {
                    Ok(outcome) => {
                        any_ok = true;
                        for warning in &outcome.warnings {
                            eprintln!("warning: {student}: {warning}");
                        }
                        for f in &outcome.report.failed_levels {
                            eprintln!("warning: {student}: level {} skipped: {}", f.level, f.reason);
                        }
                        if request.pipe {
                            print!("{}", render_json(&outcome.report));
                        } else if request.out_dir.is_none() {
                            print!("{}", gazemetry_core::report::render_markdown(&outcome.report));
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {student}: {e}");
                        first_error.get_or_insert(e.exit_code());
                    }
                }
            }
            for path in &summary.files_written {
                eprintln!("wrote {}", path.display());
            }
            if !any_ok {
                if let Some(code) = first_error {
                    std::process::exit(code);
                }
            }
            Ok(())
        }
        Command::Synth(args) => {
            let outcome = cmd_synth(&SynthRequest {
                spec_path: args.spec,
                out_path: args.out,
                truth_path: args.truth,
            })?;
            for path in &outcome.files_written {
                eprintln!("wrote {}", path.display());
            }
            eprintln!(
                "generated {} samples, {} clusters, intended hit rate {:.1}%",
                outcome.session.samples.len(),
                outcome.truth.clusters.len(),
                outcome.truth.intended_hit_rate
            );
            Ok(())
        }
        Command::ValidateConfig(args) => {
            let cfg = args.config.build()?;
            for (key, value) in cfg.echo() {
                println!("{key}={value}");
            }
            Ok(())
        }
        Command::Version => {
            println!("gazemetry {}", gazemetry::TOOL_VERSION);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::from(exit_code::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
