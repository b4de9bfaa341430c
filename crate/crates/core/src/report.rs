//! Deterministic report construction and rendering.
//!
//! A [`SessionReport`] stores presentation-ready values: every float is
//! quantized (half-up) to the precision it is emitted with — 1 decimal for
//! pixel/millisecond aggregates and percentages, 3 decimals for fractions
//! and ratios. Rendering is therefore byte-stable across runs and
//! platforms, and a re-parsed structured report compares equal to the
//! original.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::assess::{InterventionPlan, RiskAssessment, RiskProfile};
use crate::detect::{Fixation, Saccade};
use crate::math::quantize;
use crate::metrics::SessionMetrics;

fn q1(x: f64) -> f64 {
    quantize(x, 1)
}

fn q3(x: f64) -> f64 {
    quantize(x, 3)
}

/// Everything the report carries for one analyzed level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: u32,
    pub metrics: SessionMetrics,
    pub risk: RiskAssessment,
    pub profile: RiskProfile,
    pub performance: String,
    pub fixations: Vec<Fixation>,
    pub saccades: Vec<Saccade>,
    pub dropped_count: usize,
}

impl LevelReport {
    /// Builds the presentation copy of a level's results, quantizing every
    /// float to its display precision.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        level: u32,
        metrics: &SessionMetrics,
        risk: RiskAssessment,
        profile: &RiskProfile,
        performance: &str,
        fixations: &[Fixation],
        saccades: &[Saccade],
        dropped_count: usize,
    ) -> Self {
        LevelReport {
            level,
            metrics: quantize_metrics(metrics),
            risk,
            profile: RiskProfile {
                task_focus: q1(profile.task_focus),
                attention_control: q1(profile.attention_control),
                movement_efficiency: q1(profile.movement_efficiency),
                scanning_pattern: q1(profile.scanning_pattern),
                trend_score: q1(profile.trend_score),
            },
            performance: performance.to_string(),
            fixations: fixations.iter().map(quantize_fixation).collect(),
            saccades: saccades.iter().map(quantize_saccade).collect(),
            dropped_count,
        }
    }
}

/// A level that could not be analyzed, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct FailedLevel {
    pub level: u32,
    pub reason: String,
}

/// The full per-student report.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    pub student_id: String,
    pub tool_version: String,
    /// Effective configuration, in a fixed key order; enough to reproduce
    /// the report byte-for-byte from the same inputs.
    pub config_echo: Vec<(String, String)>,
    pub levels: Vec<LevelReport>,
    pub failed_levels: Vec<FailedLevel>,
    pub plan: InterventionPlan,
}

impl SessionReport {
    pub fn new(
        student_id: &str,
        tool_version: &str,
        config_echo: Vec<(String, String)>,
        levels: Vec<LevelReport>,
        failed_levels: Vec<FailedLevel>,
        mut plan: InterventionPlan,
    ) -> Self {
        plan.avg_relevance = q1(plan.avg_relevance);
        SessionReport {
            student_id: student_id.to_string(),
            tool_version: tool_version.to_string(),
            config_echo,
            levels,
            failed_levels,
            plan,
        }
    }
}

fn quantize_metrics(m: &SessionMetrics) -> SessionMetrics {
    SessionMetrics {
        hit_rate: q1(m.hit_rate),
        attention_scatter: m.attention_scatter.map(q1),
        task_relevance: m.task_relevance.map(q3),
        gaze_efficiency: m.gaze_efficiency.map(q3),
        avg_fixation_duration: m.avg_fixation_duration.map(q1),
        avg_saccade_amplitude: m.avg_saccade_amplitude.map(q1),
        avg_saccade_velocity: m.avg_saccade_velocity.map(q1),
        fix_sacc_ratio: m.fix_sacc_ratio.map(q3),
        scan_path: q1(m.scan_path),
        ..m.clone()
    }
}

fn quantize_fixation(f: &Fixation) -> Fixation {
    Fixation {
        center: crate::Point::new(q1(f.center.x), q1(f.center.y)),
        dispersion: q1(f.dispersion),
        dominant_aoi: f.dominant_aoi.clone(),
        ..*f
    }
}

fn quantize_saccade(s: &Saccade) -> Saccade {
    Saccade {
        amplitude: q1(s.amplitude),
        peak_velocity: q1(s.peak_velocity),
        from: crate::Point::new(q1(s.from.x), q1(s.from.y)),
        to: crate::Point::new(q1(s.to.x), q1(s.to.y)),
        ..*s
    }
}

/// One row of the cross-level comparison table, cells pre-formatted.
/// Undefined aggregates render as an em dash.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub level: u32,
    pub fixations: usize,
    pub saccades: usize,
    pub avg_fixation_duration: String,
    pub avg_saccade_amplitude: String,
    pub avg_saccade_velocity: String,
    pub fix_sacc_ratio: String,
}

const DASH: &str = "\u{2014}";

fn cell1(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.1}", q1(x)),
        None => DASH.to_string(),
    }
}

/// Builds the cross-level comparison rows. The ratio cell is the
/// fixation/saccade count ratio rounded half-up to one decimal, recomputed
/// from the counts rather than read from the metric.
pub fn cross_level_table(levels: &[LevelReport]) -> Vec<TableRow> {
    levels
        .iter()
        .map(|l| {
            let ratio = if l.metrics.saccade_count == 0 {
                None
            } else {
                Some(l.metrics.fixation_count as f64 / l.metrics.saccade_count as f64)
            };
            TableRow {
                level: l.level,
                fixations: l.metrics.fixation_count,
                saccades: l.metrics.saccade_count,
                avg_fixation_duration: cell1(l.metrics.avg_fixation_duration),
                avg_saccade_amplitude: cell1(l.metrics.avg_saccade_amplitude),
                avg_saccade_velocity: cell1(l.metrics.avg_saccade_velocity),
                fix_sacc_ratio: cell1(ratio),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Structured (JSON) rendering
// ---------------------------------------------------------------------------

/// An ordered JSON value tree. Floats carry their display precision so the
/// writer emits them with fixed decimals.
enum JVal {
    Null,
    Bool(bool),
    UInt(u64),
    Fixed(f64, usize),
    Str(String),
    Arr(Vec<JVal>),
    Obj(Vec<(&'static str, JVal)>),
}

impl JVal {
    fn opt_fixed(v: Option<f64>, prec: usize) -> JVal {
        match v {
            Some(x) => JVal::Fixed(x, prec),
            None => JVal::Null,
        }
    }

    fn str_list(items: &[String]) -> JVal {
        JVal::Arr(items.iter().map(|s| JVal::Str(s.clone())).collect())
    }
}

fn escape_json(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
}

fn write_jval(v: &JVal, indent: usize, out: &mut String) {
    let pad = |out: &mut String, n: usize| {
        for _ in 0..n {
            out.push_str("  ");
        }
    };
    match v {
        JVal::Null => out.push_str("null"),
        JVal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        JVal::UInt(n) => out.push_str(&n.to_string()),
        JVal::Fixed(x, prec) => out.push_str(&format!("{x:.prec$}")),
        JVal::Str(s) => {
            out.push('"');
            escape_json(s, out);
            out.push('"');
        }
        JVal::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                pad(out, indent + 1);
                write_jval(item, indent + 1, out);
            }
            out.push('\n');
            pad(out, indent);
            out.push(']');
        }
        JVal::Obj(fields) => {
            if fields.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, val)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                pad(out, indent + 1);
                out.push('"');
                out.push_str(key);
                out.push_str("\": ");
                write_jval(val, indent + 1, out);
            }
            out.push('\n');
            pad(out, indent);
            out.push('}');
        }
    }
}

fn metrics_jval(m: &SessionMetrics) -> JVal {
    JVal::Obj(alloc::vec![
        ("sample_count", JVal::UInt(m.sample_count as u64)),
        ("fixation_count", JVal::UInt(m.fixation_count as u64)),
        ("saccade_count", JVal::UInt(m.saccade_count as u64)),
        ("hit_rate", JVal::Fixed(m.hit_rate, 1)),
        ("matched", JVal::UInt(m.matched as u64)),
        ("target_count", JVal::UInt(m.target_count as u64)),
        ("no_targets", JVal::Bool(m.no_targets)),
        ("attention_scatter", JVal::opt_fixed(m.attention_scatter, 1)),
        ("task_relevance", JVal::opt_fixed(m.task_relevance, 3)),
        ("aoi_transitions", JVal::UInt(m.aoi_transitions as u64)),
        ("gaze_efficiency", JVal::opt_fixed(m.gaze_efficiency, 3)),
        ("avg_fixation_duration", JVal::opt_fixed(m.avg_fixation_duration, 1)),
        ("avg_saccade_amplitude", JVal::opt_fixed(m.avg_saccade_amplitude, 1)),
        ("avg_saccade_velocity", JVal::opt_fixed(m.avg_saccade_velocity, 1)),
        ("fix_sacc_ratio", JVal::opt_fixed(m.fix_sacc_ratio, 3)),
        ("scan_path", JVal::Fixed(m.scan_path, 1)),
        ("processing_style", JVal::Str(m.processing_style.clone())),
        ("search_pattern", JVal::Str(m.search_pattern.clone())),
    ])
}

fn fixation_jval(f: &Fixation) -> JVal {
    JVal::Obj(alloc::vec![
        ("x", JVal::Fixed(f.center.x, 1)),
        ("y", JVal::Fixed(f.center.y, 1)),
        ("start_ms", JVal::UInt(f.start_ms)),
        ("end_ms", JVal::UInt(f.end_ms)),
        ("duration_ms", JVal::UInt(f.duration_ms)),
        ("dispersion", JVal::Fixed(f.dispersion, 1)),
        ("sample_count", JVal::UInt(f.sample_count as u64)),
        (
            "dominant_aoi",
            match &f.dominant_aoi {
                Some(name) => JVal::Str(name.clone()),
                None => JVal::Null,
            },
        ),
    ])
}

fn saccade_jval(s: &Saccade) -> JVal {
    JVal::Obj(alloc::vec![
        ("amplitude", JVal::Fixed(s.amplitude, 1)),
        ("peak_velocity", JVal::Fixed(s.peak_velocity, 1)),
        ("duration_ms", JVal::UInt(s.duration_ms)),
        ("start_ms", JVal::UInt(s.start_ms)),
        ("end_ms", JVal::UInt(s.end_ms)),
        ("x1", JVal::Fixed(s.from.x, 1)),
        ("y1", JVal::Fixed(s.from.y, 1)),
        ("x2", JVal::Fixed(s.to.x, 1)),
        ("y2", JVal::Fixed(s.to.y, 1)),
        ("degenerate", JVal::Bool(s.degenerate)),
    ])
}

fn level_jval(l: &LevelReport) -> JVal {
    JVal::Obj(alloc::vec![
        ("level", JVal::UInt(l.level as u64)),
        ("dropped_count", JVal::UInt(l.dropped_count as u64)),
        ("metrics", metrics_jval(&l.metrics)),
        (
            "risk",
            JVal::Obj(alloc::vec![
                ("raw_score", JVal::UInt(l.risk.raw_score as u64)),
                ("display_score", JVal::UInt(l.risk.display_score as u64)),
                ("factors", JVal::str_list(&l.risk.factors)),
                ("notes", JVal::str_list(&l.risk.notes)),
                ("urgency", JVal::Str(l.risk.urgency.as_str().to_string())),
            ]),
        ),
        (
            "profile",
            JVal::Obj(alloc::vec![
                ("task_focus", JVal::Fixed(l.profile.task_focus, 1)),
                ("attention_control", JVal::Fixed(l.profile.attention_control, 1)),
                ("movement_efficiency", JVal::Fixed(l.profile.movement_efficiency, 1)),
                ("scanning_pattern", JVal::Fixed(l.profile.scanning_pattern, 1)),
                ("trend_score", JVal::Fixed(l.profile.trend_score, 1)),
            ]),
        ),
        ("performance", JVal::Str(l.performance.clone())),
        ("fixations", JVal::Arr(l.fixations.iter().map(fixation_jval).collect())),
        ("saccades", JVal::Arr(l.saccades.iter().map(saccade_jval).collect())),
    ])
}

/// Renders the canonical structured report: fixed key order, fixed float
/// precision, 2-space indentation, trailing newline.
pub fn render_json(report: &SessionReport) -> String {
    let config = JVal::Arr(
        report
            .config_echo
            .iter()
            .map(|(k, v)| {
                JVal::Obj(alloc::vec![
                    ("key", JVal::Str(k.clone())),
                    ("value", JVal::Str(v.clone())),
                ])
            })
            .collect(),
    );
    let failed = JVal::Arr(
        report
            .failed_levels
            .iter()
            .map(|f| {
                JVal::Obj(alloc::vec![
                    ("level", JVal::UInt(f.level as u64)),
                    ("reason", JVal::Str(f.reason.clone())),
                ])
            })
            .collect(),
    );
    let plan = JVal::Obj(alloc::vec![
        ("avg_relevance", JVal::Fixed(report.plan.avg_relevance, 1)),
        ("interventions", JVal::str_list(&report.plan.interventions)),
        ("max_urgency", JVal::Str(report.plan.max_urgency.as_str().to_string())),
        ("student_notes", JVal::Str(report.plan.student_notes.clone())),
        ("teacher_notes", JVal::Str(report.plan.teacher_notes.clone())),
        ("specialist_notes", JVal::Str(report.plan.specialist_notes.clone())),
    ]);
    let root = JVal::Obj(alloc::vec![
        ("student_id", JVal::Str(report.student_id.clone())),
        ("tool_version", JVal::Str(report.tool_version.clone())),
        ("config", config),
        ("levels", JVal::Arr(report.levels.iter().map(level_jval).collect())),
        ("failed_levels", failed),
        ("plan", plan),
    ]);
    let mut out = String::new();
    write_jval(&root, 0, &mut out);
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Markdown rendering
// ---------------------------------------------------------------------------

/// Renders the human-readable report with student-facing and
/// teacher-facing sections.
pub fn render_markdown(report: &SessionReport) -> String {
    let mut md = String::new();
    md.push_str(&format!("# Gaze Analysis Report: {}\n\n", report.student_id));

    md.push_str("## Cross-Level Eye Movement Comparison\n\n");
    md.push_str("| Level | Fixations | Saccades | Avg Fixation Duration (ms) | Avg Saccade Amplitude (px) | Avg Saccade Velocity (px/s) | Fix/Sacc Ratio |\n");
    md.push_str("|---|---|---|---|---|---|---|\n");
    for row in cross_level_table(&report.levels) {
        md.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            row.level,
            row.fixations,
            row.saccades,
            row.avg_fixation_duration,
            row.avg_saccade_amplitude,
            row.avg_saccade_velocity,
            row.fix_sacc_ratio
        ));
    }

    md.push_str("\n## For the student\n\n");
    for l in &report.levels {
        md.push_str(&format!("- Level {}: {}\n", l.level, l.performance));
    }
    md.push_str(&format!("\n{}\n", report.plan.student_notes));

    md.push_str("\n## For the teacher\n\n");
    md.push_str("| Level | Task Relevance | Attention Scatter (px) | AOI Transitions | Gaze Efficiency | Hit Rate (%) | Risk | Urgency | Factors |\n");
    md.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for l in &report.levels {
        let relevance = l
            .metrics
            .task_relevance
            .map(|r| format!("{:.1}%", q1(r * 100.0)))
            .unwrap_or_else(|| DASH.to_string());
        let factors = if l.risk.factors.is_empty() {
            DASH.to_string()
        } else {
            l.risk.factors.join("; ")
        };
        md.push_str(&format!(
            "| {} | {} | {} | {} | {} | {:.1} | {}/10 | {} | {} |\n",
            l.level,
            relevance,
            cell1(l.metrics.attention_scatter),
            l.metrics.aoi_transitions,
            match l.metrics.gaze_efficiency {
                Some(e) => format!("{e:.3}"),
                None => DASH.to_string(),
            },
            l.metrics.hit_rate,
            l.risk.display_score,
            l.risk.urgency.as_str(),
            factors
        ));
    }
    for l in &report.levels {
        for note in &l.risk.notes {
            md.push_str(&format!("- Level {} note: {}\n", l.level, note));
        }
    }
    if !report.failed_levels.is_empty() {
        md.push_str("\nLevels that could not be analyzed:\n\n");
        for f in &report.failed_levels {
            md.push_str(&format!("- Level {}: {}\n", f.level, f.reason));
        }
    }
    md.push_str("\n### Interventions\n\n");
    if report.plan.interventions.is_empty() {
        md.push_str("- none triggered\n");
    } else {
        for item in &report.plan.interventions {
            md.push_str(&format!("- {item}\n"));
        }
    }
    md.push_str(&format!("\n{}\n", report.plan.teacher_notes));

    md.push_str("\n## For the specialist\n\n");
    md.push_str("| Level | Task Focus | Attention Control | Movement Efficiency | Scanning Pattern | Trend Score |\n");
    md.push_str("|---|---|---|---|---|---|\n");
    for l in &report.levels {
        md.push_str(&format!(
            "| {} | {:.1} | {:.1} | {:.1} | {:.1} | {:.1} |\n",
            l.level,
            l.profile.task_focus,
            l.profile.attention_control,
            l.profile.movement_efficiency,
            l.profile.scanning_pattern,
            l.profile.trend_score
        ));
    }
    md.push_str(&format!("\n{}\n", report.plan.specialist_notes));
    md.push_str(
        "\nTrend score is a local composite: the mean of task focus, attention \
         control, movement efficiency, and the inverted scanning axis.\n",
    );

    md.push_str(
        "\nLabel note: the \"Needs Support\" performance label appears as \
         \"Needs Improvement\" on some dashboards; the two are equivalent.\n",
    );
    md
}

// ---------------------------------------------------------------------------
// Plot-data series rendering (one CSV per series per level)
// ---------------------------------------------------------------------------

/// `x,y,duration_ms` — one row per fixation.
pub fn render_fixations_csv(level: &LevelReport) -> String {
    let mut out = String::from("x,y,duration_ms\n");
    for f in &level.fixations {
        out.push_str(&format!("{:.1},{:.1},{}\n", f.center.x, f.center.y, f.duration_ms));
    }
    out
}

/// `x1,y1,x2,y2,amplitude,peak_velocity` — one row per saccade.
pub fn render_saccades_csv(level: &LevelReport) -> String {
    let mut out = String::from("x1,y1,x2,y2,amplitude,peak_velocity\n");
    for s in &level.saccades {
        out.push_str(&format!(
            "{:.1},{:.1},{:.1},{:.1},{:.1},{:.1}\n",
            s.from.x, s.from.y, s.to.x, s.to.y, s.amplitude, s.peak_velocity
        ));
    }
    out
}

/// `index,x,y` — fixation centers in viewing order, 1-based.
pub fn render_scanpath_csv(level: &LevelReport) -> String {
    let mut out = String::from("index,x,y\n");
    for (i, f) in level.fixations.iter().enumerate() {
        out.push_str(&format!("{},{:.1},{:.1}\n", i + 1, f.center.x, f.center.y));
    }
    out
}

/// `timestamp_ms,kind,duration_ms` — fixations and saccades merged in
/// start order (fixations first on ties).
pub fn render_timeline_csv(level: &LevelReport) -> String {
    let mut rows: Vec<(u64, u8, u64)> = level
        .fixations
        .iter()
        .map(|f| (f.start_ms, 0u8, f.duration_ms))
        .chain(level.saccades.iter().map(|s| (s.start_ms, 1u8, s.duration_ms)))
        .collect();
    rows.sort_by_key(|r| (r.0, r.1));
    let mut out = String::from("timestamp_ms,kind,duration_ms\n");
    for (t, kind, d) in rows {
        let name = if kind == 0 { "fixation" } else { "saccade" };
        out.push_str(&format!("{t},{name},{d}\n"));
    }
    out
}

const HIST_BINS: usize = 10;

fn push_histogram(out: &mut String, metric: &str, values: &[f64]) {
    if values.is_empty() {
        return;
    }
    let max = values.iter().fold(0.0f64, |a, &b| a.max(b));
    if max <= 0.0 {
        out.push_str(&format!("{metric},0.0,0.0,{}\n", values.len()));
        return;
    }
    let width = max / HIST_BINS as f64;
    let mut counts = [0usize; HIST_BINS];
    for &v in values {
        let mut bin = (v / width) as usize;
        if bin >= HIST_BINS {
            bin = HIST_BINS - 1;
        }
        counts[bin] += 1;
    }
    for (i, count) in counts.iter().enumerate() {
        out.push_str(&format!(
            "{metric},{:.1},{:.1},{count}\n",
            q1(width * i as f64),
            q1(width * (i + 1) as f64)
        ));
    }
}

/// `metric,bin_start,bin_end,count` — equal-width distribution histograms
/// for fixation durations, saccade amplitudes, and saccade peak
/// velocities.
pub fn render_histograms_csv(level: &LevelReport) -> String {
    let mut out = String::from("metric,bin_start,bin_end,count\n");
    let durations: Vec<f64> = level.fixations.iter().map(|f| f.duration_ms as f64).collect();
    let amplitudes: Vec<f64> = level.saccades.iter().map(|s| s.amplitude).collect();
    let velocities: Vec<f64> = level.saccades.iter().map(|s| s.peak_velocity).collect();
    push_histogram(&mut out, "fixation_duration_ms", &durations);
    push_histogram(&mut out, "saccade_amplitude_px", &amplitudes);
    push_histogram(&mut out, "saccade_velocity_px_s", &velocities);
    out
}
