//! Report emission and re-parsing.
//!
//! Emission renders through the core's deterministic writers; parsing goes
//! through `serde_json`, deliberately a separate code path, so the
//! round-trip check exercises two independent routes.

use std::fs;
use std::path::{Path, PathBuf};

use gazemetry_core::assess::{InterventionPlan, RiskAssessment, RiskProfile, Urgency};
use gazemetry_core::detect::{Fixation, Saccade};
use gazemetry_core::metrics::SessionMetrics;
use gazemetry_core::report::{
    render_fixations_csv, render_histograms_csv, render_json, render_markdown,
    render_saccades_csv, render_scanpath_csv, render_timeline_csv, FailedLevel, LevelReport,
    SessionReport,
};
use gazemetry_core::Point;
use serde_json::Value;

use crate::error::CliError;

/// Which outputs `emit_reports` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub markdown: bool,
    pub plots: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            json: true,
            markdown: true,
            plots: true,
        }
    }
}

impl Formats {
    /// Parses a comma-separated selection, e.g. `json,md` or `all`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut f = Formats {
            json: false,
            markdown: false,
            plots: false,
        };
        for part in text.split(',') {
            match part.trim() {
                "json" => f.json = true,
                "md" | "markdown" => f.markdown = true,
                "plots" => f.plots = true,
                "all" => f = Formats::default(),
                "" => {}
                other => return Err(format!("unknown format {other:?} (json|md|plots|all)")),
            }
        }
        Ok(f)
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the selected report files into `out_dir`, returning the paths
/// written: `report.json`, `report.md`, and per-level
/// `plots/{fixations,saccades,scanpath,timeline,hist}_L<k>.csv`.
pub fn emit_reports(
    report: &SessionReport,
    formats: Formats,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if formats.json {
        let path = out_dir.join("report.json");
        write(&path, &render_json(report))?;
        written.push(path);
    }
    if formats.markdown {
        let path = out_dir.join("report.md");
        write(&path, &render_markdown(report))?;
        written.push(path);
    }
    if formats.plots {
        let plots = out_dir.join("plots");
        fs::create_dir_all(&plots).map_err(|source| CliError::Output {
            path: plots.clone(),
            source,
        })?;
        for level in &report.levels {
            let k = level.level;
            for (name, contents) in [
                (format!("fixations_L{k}.csv"), render_fixations_csv(level)),
                (format!("saccades_L{k}.csv"), render_saccades_csv(level)),
                (format!("scanpath_L{k}.csv"), render_scanpath_csv(level)),
                (format!("timeline_L{k}.csv"), render_timeline_csv(level)),
                (format!("hist_L{k}.csv"), render_histograms_csv(level)),
            ] {
                let path = plots.join(name);
                write(&path, &contents)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// Parsing (round-trip route)
// ---------------------------------------------------------------------------

fn ctx(what: &str) -> CliError {
    CliError::Parse {
        path: PathBuf::from("report.json"),
        row: None,
        message: format!("missing or invalid field: {what}"),
    }
}

fn as_str(v: &Value, what: &str) -> Result<String, CliError> {
    v.as_str().map(String::from).ok_or_else(|| ctx(what))
}

fn as_u64(v: &Value, what: &str) -> Result<u64, CliError> {
    v.as_u64().ok_or_else(|| ctx(what))
}

fn as_f64(v: &Value, what: &str) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| ctx(what))
}

fn opt_f64(v: &Value, what: &str) -> Result<Option<f64>, CliError> {
    if v.is_null() {
        Ok(None)
    } else {
        as_f64(v, what).map(Some)
    }
}

fn as_bool(v: &Value, what: &str) -> Result<bool, CliError> {
    v.as_bool().ok_or_else(|| ctx(what))
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value, CliError> {
    v.get(key).ok_or_else(|| ctx(key))
}

fn str_list(v: &Value, what: &str) -> Result<Vec<String>, CliError> {
    v.as_array()
        .ok_or_else(|| ctx(what))?
        .iter()
        .map(|s| as_str(s, what))
        .collect()
}

fn parse_urgency(text: &str) -> Result<Urgency, CliError> {
    match text {
        "HIGH" => Ok(Urgency::High),
        "MODERATE" => Ok(Urgency::Moderate),
        "LOW" => Ok(Urgency::Low),
        _ => Err(ctx("urgency")),
    }
}

fn parse_metrics(v: &Value) -> Result<SessionMetrics, CliError> {
    Ok(SessionMetrics {
        sample_count: as_u64(get(v, "sample_count")?, "sample_count")? as usize,
        fixation_count: as_u64(get(v, "fixation_count")?, "fixation_count")? as usize,
        saccade_count: as_u64(get(v, "saccade_count")?, "saccade_count")? as usize,
        hit_rate: as_f64(get(v, "hit_rate")?, "hit_rate")?,
        matched: as_u64(get(v, "matched")?, "matched")? as usize,
        target_count: as_u64(get(v, "target_count")?, "target_count")? as usize,
        no_targets: as_bool(get(v, "no_targets")?, "no_targets")?,
        attention_scatter: opt_f64(get(v, "attention_scatter")?, "attention_scatter")?,
        task_relevance: opt_f64(get(v, "task_relevance")?, "task_relevance")?,
        aoi_transitions: as_u64(get(v, "aoi_transitions")?, "aoi_transitions")? as usize,
        gaze_efficiency: opt_f64(get(v, "gaze_efficiency")?, "gaze_efficiency")?,
        avg_fixation_duration: opt_f64(get(v, "avg_fixation_duration")?, "avg_fixation_duration")?,
        avg_saccade_amplitude: opt_f64(get(v, "avg_saccade_amplitude")?, "avg_saccade_amplitude")?,
        avg_saccade_velocity: opt_f64(get(v, "avg_saccade_velocity")?, "avg_saccade_velocity")?,
        fix_sacc_ratio: opt_f64(get(v, "fix_sacc_ratio")?, "fix_sacc_ratio")?,
        scan_path: as_f64(get(v, "scan_path")?, "scan_path")?,
        processing_style: as_str(get(v, "processing_style")?, "processing_style")?,
        search_pattern: as_str(get(v, "search_pattern")?, "search_pattern")?,
    })
}

fn parse_fixation(v: &Value) -> Result<Fixation, CliError> {
    let aoi = get(v, "dominant_aoi")?;
    Ok(Fixation {
        center: Point::new(as_f64(get(v, "x")?, "x")?, as_f64(get(v, "y")?, "y")?),
        start_ms: as_u64(get(v, "start_ms")?, "start_ms")?,
        end_ms: as_u64(get(v, "end_ms")?, "end_ms")?,
        duration_ms: as_u64(get(v, "duration_ms")?, "duration_ms")?,
        dispersion: as_f64(get(v, "dispersion")?, "dispersion")?,
        sample_count: as_u64(get(v, "sample_count")?, "sample_count")? as usize,
        dominant_aoi: if aoi.is_null() {
            None
        } else {
            Some(as_str(aoi, "dominant_aoi")?)
        },
    })
}

fn parse_saccade(v: &Value) -> Result<Saccade, CliError> {
    Ok(Saccade {
        amplitude: as_f64(get(v, "amplitude")?, "amplitude")?,
        peak_velocity: as_f64(get(v, "peak_velocity")?, "peak_velocity")?,
        duration_ms: as_u64(get(v, "duration_ms")?, "duration_ms")?,
        start_ms: as_u64(get(v, "start_ms")?, "start_ms")?,
        end_ms: as_u64(get(v, "end_ms")?, "end_ms")?,
        from: Point::new(as_f64(get(v, "x1")?, "x1")?, as_f64(get(v, "y1")?, "y1")?),
        to: Point::new(as_f64(get(v, "x2")?, "x2")?, as_f64(get(v, "y2")?, "y2")?),
        degenerate: as_bool(get(v, "degenerate")?, "degenerate")?,
    })
}

fn parse_level(v: &Value) -> Result<LevelReport, CliError> {
    let risk = get(v, "risk")?;
    let profile = get(v, "profile")?;
    Ok(LevelReport {
        level: as_u64(get(v, "level")?, "level")? as u32,
        metrics: parse_metrics(get(v, "metrics")?)?,
        risk: RiskAssessment {
            raw_score: as_u64(get(risk, "raw_score")?, "raw_score")? as u32,
            display_score: as_u64(get(risk, "display_score")?, "display_score")? as u32,
            factors: str_list(get(risk, "factors")?, "factors")?,
            notes: str_list(get(risk, "notes")?, "notes")?,
            urgency: parse_urgency(&as_str(get(risk, "urgency")?, "urgency")?)?,
        },
        profile: RiskProfile {
            task_focus: as_f64(get(profile, "task_focus")?, "task_focus")?,
            attention_control: as_f64(get(profile, "attention_control")?, "attention_control")?,
            movement_efficiency: as_f64(
                get(profile, "movement_efficiency")?,
                "movement_efficiency",
            )?,
            scanning_pattern: as_f64(get(profile, "scanning_pattern")?, "scanning_pattern")?,
            trend_score: as_f64(get(profile, "trend_score")?, "trend_score")?,
        },
        performance: as_str(get(v, "performance")?, "performance")?,
        fixations: get(v, "fixations")?
            .as_array()
            .ok_or_else(|| ctx("fixations"))?
            .iter()
            .map(parse_fixation)
            .collect::<Result<_, _>>()?,
        saccades: get(v, "saccades")?
            .as_array()
            .ok_or_else(|| ctx("saccades"))?
            .iter()
            .map(parse_saccade)
            .collect::<Result<_, _>>()?,
        dropped_count: as_u64(get(v, "dropped_count")?, "dropped_count")? as usize,
    })
}

/// Re-parses a structured report emitted by
/// [`render_json`](gazemetry_core::report::render_json). A parsed report
/// compares equal to the one that was rendered.
pub fn parse_report(text: &str) -> Result<SessionReport, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: PathBuf::from("report.json"),
        row: None,
        message: e.to_string(),
    })?;
    let config_echo = get(&root, "config")?
        .as_array()
        .ok_or_else(|| ctx("config"))?
        .iter()
        .map(|entry| {
            Ok((
                as_str(get(entry, "key")?, "config.key")?,
                as_str(get(entry, "value")?, "config.value")?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let levels = get(&root, "levels")?
        .as_array()
        .ok_or_else(|| ctx("levels"))?
        .iter()
        .map(parse_level)
        .collect::<Result<Vec<_>, _>>()?;
    let failed_levels = get(&root, "failed_levels")?
        .as_array()
        .ok_or_else(|| ctx("failed_levels"))?
        .iter()
        .map(|f| {
            Ok(FailedLevel {
                level: as_u64(get(f, "level")?, "failed level")? as u32,
                reason: as_str(get(f, "reason")?, "failed reason")?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let plan_v = get(&root, "plan")?;
    let plan = InterventionPlan {
        avg_relevance: as_f64(get(plan_v, "avg_relevance")?, "avg_relevance")?,
        interventions: str_list(get(plan_v, "interventions")?, "interventions")?,
        max_urgency: parse_urgency(&as_str(get(plan_v, "max_urgency")?, "max_urgency")?)?,
        student_notes: as_str(get(plan_v, "student_notes")?, "student_notes")?,
        teacher_notes: as_str(get(plan_v, "teacher_notes")?, "teacher_notes")?,
        specialist_notes: as_str(get(plan_v, "specialist_notes")?, "specialist_notes")?,
    };
    Ok(SessionReport {
        student_id: as_str(get(&root, "student_id")?, "student_id")?,
        tool_version: as_str(get(&root, "tool_version")?, "tool_version")?,
        config_echo,
        levels,
        failed_levels,
        plan,
    })
}
