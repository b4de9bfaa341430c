//! Risk scoring, urgency tiers, intervention planning, and the
//! four-axis risk profile.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::math;
use crate::metrics::SessionMetrics;

/// Additive risk-rule thresholds and weights plus the profile anchors.
/// Defaults are the standard rule constants; every field is
/// overridable through the CLI config.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessConfig {
    pub relevance_critical: f64,
    pub relevance_critical_weight: u32,
    pub relevance_low: f64,
    pub relevance_low_weight: u32,
    pub scatter_threshold: f64,
    pub scatter_weight: u32,
    pub transitions_threshold: usize,
    pub transitions_weight: u32,
    pub hit_rate_threshold: f64,
    pub hit_rate_weight: u32,
    /// Raw scores strictly above this are HIGH urgency.
    pub urgency_high: u32,
    /// Raw scores strictly above this (and not HIGH) are MODERATE.
    pub urgency_moderate: u32,
    /// Mean relevance (percent) strictly below this adds the focus tier.
    pub plan_focus_percent: f64,
    /// Mean relevance (percent) strictly below this adds the
    /// sustained-attention tier when the focus tier did not fire.
    pub plan_sustained_percent: f64,
    /// Scatter at or below this scores full attention-control marks.
    pub profile_scatter_anchor: f64,
    /// Scatter range over which attention control decays to zero.
    pub profile_scatter_range: f64,
    /// Gaze efficiency that earns full movement-efficiency marks.
    pub profile_efficiency_anchor: f64,
    /// Transition count that saturates the scanning-pattern axis.
    pub profile_transitions_anchor: f64,
}

impl Default for AssessConfig {
    fn default() -> Self {
        AssessConfig {
            relevance_critical: 0.30,
            relevance_critical_weight: 3,
            relevance_low: 0.50,
            relevance_low_weight: 2,
            scatter_threshold: 400.0,
            scatter_weight: 3,
            transitions_threshold: 60,
            transitions_weight: 2,
            hit_rate_threshold: 50.0,
            hit_rate_weight: 3,
            urgency_high: 6,
            urgency_moderate: 3,
            plan_focus_percent: 40.0,
            plan_sustained_percent: 60.0,
            profile_scatter_anchor: 200.0,
            profile_scatter_range: 600.0,
            profile_efficiency_anchor: 0.5,
            profile_transitions_anchor: 80.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Urgency {
    Low,
    Moderate,
    High,
}

impl Urgency {
    pub fn as_str(&self) -> &'static str {
        match self {
            Urgency::High => "HIGH",
            Urgency::Moderate => "MODERATE",
            Urgency::Low => "LOW",
        }
    }
}

/// Outcome of the additive risk rules for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskAssessment {
    /// Unbounded rule sum; monotone in every trigger.
    pub raw_score: u32,
    /// Presentation value, capped at 10.
    pub display_score: u32,
    /// Triggered factor labels, in rule-evaluation order.
    pub factors: Vec<String>,
    /// Provenance notes, e.g. metrics that were unavailable and treated
    /// as worst case.
    pub notes: Vec<String>,
    pub urgency: Urgency,
}

/// Cross-level intervention plan.
#[derive(Debug, Clone, PartialEq)]
pub struct InterventionPlan {
    /// Mean task relevance across levels, percent.
    pub avg_relevance: f64,
    pub interventions: Vec<String>,
    pub max_urgency: Urgency,
    pub student_notes: String,
    pub teacher_notes: String,
    pub specialist_notes: String,
}

/// Four-axis profile, each dimension in [0, 100]. Higher scanning_pattern
/// means more problematic scanning; the other axes are higher-is-better.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    pub task_focus: f64,
    pub attention_control: f64,
    pub movement_efficiency: f64,
    pub scanning_pattern: f64,
    /// Unweighted mean of the three positive axes and the inverted
    /// scanning axis — a local composite trend score.
    pub trend_score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssessError {
    /// plan_interventions needs at least one level.
    NoLevels,
}

impl core::fmt::Display for AssessError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AssessError::NoLevels => write!(f, "no analyzed levels to plan from"),
        }
    }
}

fn urgency_for(raw: u32, cfg: &AssessConfig) -> Urgency {
    if raw > cfg.urgency_high {
        Urgency::High
    } else if raw > cfg.urgency_moderate {
        Urgency::Moderate
    } else {
        Urgency::Low
    }
}

/// Additive risk scoring. Comparison directions are exact: relevance rules
/// are strict `<`, scatter and transitions strict `>`, hit rate strict
/// `<`. Metrics that are unavailable count as their worst case and leave a
/// provenance note.
pub fn risk_score(m: &SessionMetrics, cfg: &AssessConfig) -> RiskAssessment {
    let mut raw = 0u32;
    let mut factors = Vec::new();
    let mut notes = Vec::new();

    let relevance = m.task_relevance.unwrap_or_else(|| {
        notes.push("task_relevance unavailable; treated as worst case".to_string());
        0.0
    });
    if relevance < cfg.relevance_critical {
        raw += cfg.relevance_critical_weight;
        factors.push("Critical task focus deficit".to_string());
    } else if relevance < cfg.relevance_low {
        raw += cfg.relevance_low_weight;
        factors.push("Low task focus".to_string());
    }

    let scatter = m.attention_scatter.unwrap_or_else(|| {
        notes.push("attention_scatter unavailable; treated as worst case".to_string());
        f64::INFINITY
    });
    if scatter > cfg.scatter_threshold {
        raw += cfg.scatter_weight;
        factors.push("Poor attention control".to_string());
    }

    if m.aoi_transitions > cfg.transitions_threshold {
        raw += cfg.transitions_weight;
        factors.push("Hyperactive scanning".to_string());
    }

    if m.hit_rate < cfg.hit_rate_threshold {
        raw += cfg.hit_rate_weight;
        factors.push("Very low performance".to_string());
    }

    RiskAssessment {
        raw_score: raw,
        display_score: raw.min(10),
        factors,
        notes,
        urgency: urgency_for(raw, cfg),
    }
}

/// Performance label from a level's task relevance.
pub fn performance_label(task_relevance: f64) -> &'static str {
    if task_relevance >= 0.70 {
        "Excellent"
    } else if task_relevance >= 0.50 {
        "Good"
    } else {
        "Needs Support"
    }
}

fn clamp_axis(v: f64) -> f64 {
    v.clamp(0.0, 100.0)
}

/// Maps one level's metrics onto the four profile axes. Unavailable
/// metrics pin their axis to the worst value.
pub fn risk_profile(m: &SessionMetrics, cfg: &AssessConfig) -> RiskProfile {
    let task_focus = clamp_axis(m.task_relevance.map(|r| 100.0 * r).unwrap_or(0.0));
    let attention_control = clamp_axis(match m.attention_scatter {
        Some(s) => {
            let overflow = (s - cfg.profile_scatter_anchor).max(0.0);
            100.0 * (1.0 - overflow / cfg.profile_scatter_range)
        }
        None => 0.0,
    });
    let movement_efficiency = clamp_axis(
        m.gaze_efficiency
            .map(|e| 100.0 * e / cfg.profile_efficiency_anchor)
            .unwrap_or(0.0),
    );
    let scanning_pattern = clamp_axis(
        100.0 * m.aoi_transitions as f64 / cfg.profile_transitions_anchor,
    );
    let trend_score =
        (task_focus + attention_control + movement_efficiency + (100.0 - scanning_pattern)) / 4.0;
    RiskProfile {
        task_focus,
        attention_control,
        movement_efficiency,
        scanning_pattern,
        trend_score,
    }
}

const FOCUS_TIER: [&str; 3] = ["Focus training", "Reduce distractions", "Attention cuing"];
const SUSTAINED_TIER: [&str; 2] = ["Sustained attention practice", "Visual attention training"];

fn friendly_challenge(factor: &str) -> &'static str {
    match factor {
        "Critical task focus deficit" | "Low task focus" => "difficulty maintaining focus",
        "Poor attention control" => "high distractibility",
        "Hyperactive scanning" => "frequent gaze shifts",
        "Very low performance" => "low task accuracy",
        _ => "attention regulation",
    }
}

/// Builds the cross-level intervention plan: relevance tiers, urgency
/// escalation items, and differentiated notes for students, teachers, and
/// specialists. Levels with unavailable relevance count as 0% with a note
/// in the teacher block.
pub fn plan_interventions(
    levels: &[SessionMetrics],
    risks: &[RiskAssessment],
) -> Result<InterventionPlan, AssessError> {
    plan_interventions_with(levels, risks, &AssessConfig::default())
}

pub fn plan_interventions_with(
    levels: &[SessionMetrics],
    risks: &[RiskAssessment],
    cfg: &AssessConfig,
) -> Result<InterventionPlan, AssessError> {
    if levels.is_empty() {
        return Err(AssessError::NoLevels);
    }
    let mut missing_relevance = 0usize;
    let sum: f64 = levels
        .iter()
        .map(|m| match m.task_relevance {
            Some(r) => r * 100.0,
            None => {
                missing_relevance += 1;
                0.0
            }
        })
        .sum();
    let avg_relevance = sum / levels.len() as f64;

    let mut interventions: Vec<String> = Vec::new();
    if avg_relevance < cfg.plan_focus_percent {
        interventions.extend(FOCUS_TIER.iter().map(|s| s.to_string()));
    } else if avg_relevance < cfg.plan_sustained_percent {
        interventions.extend(SUSTAINED_TIER.iter().map(|s| s.to_string()));
    }
    let max_urgency = risks.iter().map(|r| r.urgency).max().unwrap_or(Urgency::Low);
    match max_urgency {
        Urgency::High => interventions.push("Immediate intervention needed".to_string()),
        Urgency::Moderate => interventions.push("Preventive measures".to_string()),
        Urgency::Low => {}
    }

    // Student block: friendly challenges from the union of factors, plus a
    // strength line.
    let mut challenges: Vec<&str> = Vec::new();
    for r in risks {
        for f in &r.factors {
            let c = friendly_challenge(f);
            if !challenges.contains(&c) {
                challenges.push(c);
            }
        }
    }
    let strong_levels: Vec<String> = levels
        .iter()
        .enumerate()
        .filter(|(_, m)| m.task_relevance.map(|r| r >= 0.50).unwrap_or(false))
        .map(|(i, _)| format!("level {}", i + 1))
        .collect();
    let strengths = if strong_levels.is_empty() {
        "work in progress".to_string()
    } else {
        format!("steady focus on {}", strong_levels.join(", "))
    };
    let student_notes = if challenges.is_empty() {
        format!("Great focus overall. Strengths: {strengths}.")
    } else {
        format!(
            "Main challenges: {}. Strengths: {strengths}. Keep practicing!",
            challenges.join(", ")
        )
    };

    let mut teacher_lines: Vec<String> = Vec::new();
    teacher_lines.push(format!(
        "Average task relevance {avg_relevance:.1}% across {} level(s); overall urgency {}.",
        levels.len(),
        max_urgency.as_str()
    ));
    if missing_relevance > 0 {
        teacher_lines.push(format!(
            "{missing_relevance} level(s) lacked a task-relevance measure and count as 0%."
        ));
    }
    if interventions.is_empty() {
        teacher_lines.push("No interventions triggered.".to_string());
    } else {
        teacher_lines.push(format!("Recommended: {}.", interventions.join("; ")));
    }
    let teacher_notes = teacher_lines.join(" ");

    let specialist_notes = format!(
        "Max urgency {}; per-level raw risk scores: {}.",
        max_urgency.as_str(),
        risks
            .iter()
            .map(|r| r.raw_score.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );

    Ok(InterventionPlan {
        avg_relevance,
        interventions,
        max_urgency,
        student_notes,
        teacher_notes,
        specialist_notes,
    })
}

/// Rounds a profile axis the way reports display it.
pub fn quantize_axis(v: f64) -> f64 {
    math::quantize(v, 1)
}
