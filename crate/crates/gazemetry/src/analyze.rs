//! End-to-end session analysis: ingest -> detect -> metrics -> assess ->
//! report, per level, plus batch mode over a directory of session files.

use std::fs;
use std::path::{Path, PathBuf};

use gazemetry_core::assess::{
    performance_label, plan_interventions_with, risk_profile, risk_score,
};
use gazemetry_core::detect::{detect_events_traced, SampleTrace};
use gazemetry_core::ingest::{
    detect_coord_mode, filter_samples, to_screen_cols, AoiMap, AoiRect, CoordMode, RawSample,
    RawSession,
};
use gazemetry_core::metrics::compute_session_metrics;
use gazemetry_core::report::{FailedLevel, LevelReport, SessionReport};

use crate::config::{CoordSetting, EffectiveConfig};
use crate::error::CliError;
use crate::report_io::{emit_reports, Formats};
use crate::session_file::{
    coordinate_columns, levels_of, read_session, timeline_events, SessionLog,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A fully analyzed session, before any files are written.
#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub report: SessionReport,
    /// Per-level clustering traces for the debug dump.
    pub traces: Vec<(u32, Vec<SampleTrace>)>,
    /// AOI normalization warnings and similar diagnostics.
    pub warnings: Vec<String>,
}

/// Runs the full pipeline over a parsed log. Levels that fail (for
/// example, every sample invalid) are reported in `failed_levels` and do
/// not abort the rest; the whole session errors only when no level
/// survives.
pub fn analyze_log(
    log: &SessionLog,
    cfg: &EffectiveConfig,
    sidecar_aois: Option<Vec<AoiRect>>,
    student_id: &str,
    source: &Path,
) -> Result<AnalyzeOutcome, CliError> {
    let nominal_aois = sidecar_aois.unwrap_or_else(|| log.inline_aois.clone());
    let (aoi_map, warnings) = AoiMap::new(nominal_aois, &cfg.screen);

    let (x_normalized, y_normalized) = resolve_coord_modes(log, cfg.coords);

    let mut levels = Vec::new();
    let mut failed = Vec::new();
    let mut metrics_per_level = Vec::new();
    let mut risks = Vec::new();
    let mut traces = Vec::new();

    for level in levels_of(log) {
        let samples: Vec<RawSample> = log
            .rows
            .iter()
            .filter(|r| r.level == level && !r.event_only)
            .map(|r| RawSample {
                timestamp_ms: r.timestamp_ms,
                point: r
                    .point
                    .map(|p| to_screen_cols(p, &cfg.screen, x_normalized, y_normalized)),
                level: r.level,
                event: r.event.clone(),
            })
            .collect();
        let events = timeline_events(
            &log.rows
                .iter()
                .filter(|r| r.level == level)
                .cloned()
                .collect::<Vec<_>>(),
        );
        let session = RawSession {
            samples,
            events,
            aoi_map: aoi_map.clone(),
            screen: cfg.screen.clone(),
        };
        let clean = match filter_samples(session) {
            Ok(clean) => clean,
            Err(e) => {
                failed.push(FailedLevel {
                    level,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let (fixations, saccades, level_traces) =
            detect_events_traced(&clean.samples, &cfg.detection, &clean.aoi_map);
        let metrics = compute_session_metrics(&clean, &fixations, &saccades, &cfg.matching);
        let risk = risk_score(&metrics, &cfg.assess);
        let profile = risk_profile(&metrics, &cfg.assess);
        let performance = performance_label(metrics.task_relevance.unwrap_or(0.0));
        levels.push(LevelReport::new(
            level,
            &metrics,
            risk.clone(),
            &profile,
            performance,
            &fixations,
            &saccades,
            clean.dropped_count,
        ));
        metrics_per_level.push(metrics);
        risks.push(risk);
        traces.push((level, level_traces));
    }

    if levels.is_empty() {
        return Err(CliError::EmptySession(source.to_path_buf()));
    }
    let plan = plan_interventions_with(&metrics_per_level, &risks, &cfg.assess)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let report = SessionReport::new(student_id, TOOL_VERSION, cfg.echo(), levels, failed, plan);
    Ok(AnalyzeOutcome {
        report,
        traces,
        warnings,
    })
}

fn resolve_coord_modes(log: &SessionLog, setting: CoordSetting) -> (bool, bool) {
    match setting {
        CoordSetting::Normalized => (true, true),
        CoordSetting::Pixel => (false, false),
        CoordSetting::Auto => {
            let (xs, ys) = coordinate_columns(&log.rows);
            (
                detect_coord_mode(xs.into_iter()) == CoordMode::Normalized,
                detect_coord_mode(ys.into_iter()) == CoordMode::Normalized,
            )
        }
    }
}

/// The per-sample debug dump: velocity, basic I-VT label, and greedy
/// cluster id for every sample of one level.
pub fn render_label_dump(traces: &[SampleTrace]) -> String {
    let mut out = String::from("index,timestamp_ms,velocity,basic_label,cluster_id\n");
    for t in traces {
        let velocity = match t.velocity {
            Some(v) if v.is_finite() => format!("{v:.3}"),
            Some(_) => "inf".to_string(),
            None => String::new(),
        };
        let basic = t.basic.map(|k| k.as_str()).unwrap_or("");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.index, t.timestamp_ms, velocity, basic, t.cluster_id
        ));
    }
    out
}

/// Options for one `analyze` invocation.
#[derive(Debug, Clone, Default)]
pub struct AnalyzeRequest {
    pub input: PathBuf,
    pub aoi_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub formats: Formats,
    pub student_id: Option<String>,
    pub dump_labels: bool,
    /// Print the structured report to stdout and nothing else there.
    pub pipe: bool,
}

impl AnalyzeRequest {
    fn student_id_for(&self, path: &Path) -> String {
        self.student_id.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "student".to_string())
        })
    }
}

/// Result of `cmd_analyze`: per-student outcomes in processing order.
pub struct AnalyzeSummary {
    pub students: Vec<(String, Result<AnalyzeOutcome, CliError>)>,
    pub files_written: Vec<PathBuf>,
}

/// Analyzes one session file or (batch mode) a directory of them. Batch
/// failures are collected per student; the call itself errors only on
/// setup problems or when a single-file run fails.
pub fn cmd_analyze(req: &AnalyzeRequest, cfg: &EffectiveConfig) -> Result<AnalyzeSummary, CliError> {
    cfg.validate()?;
    let sidecar = match &req.aoi_path {
        Some(path) => Some(crate::aoi_file::read_aois(path)?),
        None => None,
    };
    if !req.input.exists() {
        return Err(CliError::MissingInput(req.input.clone()));
    }

    if req.input.is_dir() {
        let out_root = req.out_dir.clone().ok_or_else(|| {
            CliError::Config("batch mode (directory input) requires --out".into())
        })?;
        let mut entries: Vec<PathBuf> = fs::read_dir(&req.input)
            .map_err(|e| CliError::Internal(e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|e| e == "csv").unwrap_or(false))
            .collect();
        entries.sort();
        if entries.is_empty() {
            return Err(CliError::MissingInput(req.input.join("*.csv")));
        }
        let mut summary = AnalyzeSummary {
            students: Vec::new(),
            files_written: Vec::new(),
        };
        for path in entries {
            // Batch mode always derives the id from the file name so
            // students stay distinct.
            let student = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "student".to_string());
            let result = analyze_one(&path, req, cfg, sidecar.clone(), &student)
                .map(|(outcome, mut files)| {
                    summary.files_written.append(&mut files);
                    outcome
                });
            summary.students.push((student, result));
        }
        let index_files = write_batch_index(&summary, &out_root)?;
        summary.files_written.extend(index_files);
        Ok(summary)
    } else {
        let student = req.student_id_for(&req.input);
        let (outcome, files) = analyze_one(&req.input, req, cfg, sidecar, &student)?;
        Ok(AnalyzeSummary {
            students: vec![(student, Ok(outcome))],
            files_written: files,
        })
    }
}

fn analyze_one(
    path: &Path,
    req: &AnalyzeRequest,
    cfg: &EffectiveConfig,
    sidecar: Option<Vec<AoiRect>>,
    student: &str,
) -> Result<(AnalyzeOutcome, Vec<PathBuf>), CliError> {
    let log = read_session(path, &cfg.columns)?;
    let outcome = analyze_log(&log, cfg, sidecar, student, path)?;
    let mut files = Vec::new();
    if let Some(out_root) = &req.out_dir {
        let out_dir = if req.input.is_dir() {
            out_root.join(student)
        } else {
            out_root.clone()
        };
        files = emit_reports(&outcome.report, req.formats, &out_dir)?;
        if req.dump_labels {
            for (level, traces) in &outcome.traces {
                let path = out_dir.join(format!("labels_L{level}.csv"));
                fs::write(&path, render_label_dump(traces)).map_err(|source| {
                    CliError::Output {
                        path: path.clone(),
                        source,
                    }
                })?;
                files.push(path);
            }
        }
    }
    Ok((outcome, files))
}

fn write_batch_index(summary: &AnalyzeSummary, out_root: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_root).map_err(|source| CliError::Output {
        path: out_root.to_path_buf(),
        source,
    })?;
    let mut csv = String::from(
        "student,status,levels,failed_levels,max_urgency,max_display_score,avg_relevance\n",
    );
    let mut md = String::from("# Batch index\n\n| Student | Status | Levels | Max urgency | Max risk | Avg relevance |\n|---|---|---|---|---|---|\n");
    for (student, result) in &summary.students {
        match result {
            Ok(outcome) => {
                let r = &outcome.report;
                let max_urgency = r
                    .levels
                    .iter()
                    .map(|l| l.risk.urgency)
                    .max()
                    .map(|u| u.as_str())
                    .unwrap_or("LOW");
                let max_score = r.levels.iter().map(|l| l.risk.display_score).max().unwrap_or(0);
                csv.push_str(&format!(
                    "{student},ok,{},{},{max_urgency},{max_score},{:.1}\n",
                    r.levels.len(),
                    r.failed_levels.len(),
                    r.plan.avg_relevance
                ));
                md.push_str(&format!(
                    "| {student} | ok | {} | {max_urgency} | {max_score}/10 | {:.1}% |\n",
                    r.levels.len(),
                    r.plan.avg_relevance
                ));
            }
            Err(e) => {
                let reason = e.to_string().replace(',', ";");
                csv.push_str(&format!("{student},error: {reason},0,0,,,\n"));
                md.push_str(&format!("| {student} | error: {reason} | 0 | — | — | — |\n"));
            }
        }
    }
    let csv_path = out_root.join("index.csv");
    let md_path = out_root.join("index.md");
    fs::write(&csv_path, csv).map_err(|source| CliError::Output {
        path: csv_path.clone(),
        source,
    })?;
    fs::write(&md_path, md).map_err(|source| CliError::Output {
        path: md_path.clone(),
        source,
    })?;
    Ok(vec![csv_path, md_path])
}
