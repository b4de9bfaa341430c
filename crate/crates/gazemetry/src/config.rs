//! Effective configuration: defaults, overlaid by a key=value config file,
//! overlaid by CLI flags — rightmost wins. The result is echoed into every
//! report so a run can be reproduced from the report alone.

use std::fs;
use std::path::Path;

use gazemetry_core::assess::AssessConfig;
use gazemetry_core::detect::DetectionConfig;
use gazemetry_core::ingest::YOrigin;
use gazemetry_core::metrics::MatchConfig;
use gazemetry_core::ScreenConfig;

use crate::error::CliError;

/// File-level coordinate interpretation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordSetting {
    /// Per-column detection: a column is normalized iff >= 99% of its
    /// values lie in [0, 1].
    #[default]
    Auto,
    Normalized,
    Pixel,
}

impl CoordSetting {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoordSetting::Auto => "auto",
            CoordSetting::Normalized => "normalized",
            CoordSetting::Pixel => "pixel",
        }
    }

    fn parse(v: &str) -> Result<Self, String> {
        match v {
            "auto" => Ok(CoordSetting::Auto),
            "normalized" => Ok(CoordSetting::Normalized),
            "pixel" => Ok(CoordSetting::Pixel),
            other => Err(format!("coords must be auto|normalized|pixel, got {other:?}")),
        }
    }
}

/// Canonical column name -> actual header name remapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMap {
    pub timestamp: String,
    pub gaze: String,
    pub gaze_x: String,
    pub gaze_y: String,
    pub event: String,
    pub level: String,
    pub aoi_name: String,
    pub aoi_x: String,
    pub aoi_y: String,
    pub aoi_w: String,
    pub aoi_h: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            timestamp: "timestamp_ms".into(),
            gaze: "gaze".into(),
            gaze_x: "gaze_x".into(),
            gaze_y: "gaze_y".into(),
            event: "event".into(),
            level: "level".into(),
            aoi_name: "aoi_name".into(),
            aoi_x: "aoi_x".into(),
            aoi_y: "aoi_y".into(),
            aoi_w: "aoi_w".into(),
            aoi_h: "aoi_h".into(),
        }
    }
}

/// Everything a run needs, fully resolved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EffectiveConfig {
    pub screen: ScreenConfig,
    pub coords: CoordSetting,
    pub columns: ColumnMap,
    pub detection: DetectionConfig,
    pub matching: MatchConfig,
    pub assess: AssessConfig,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

impl EffectiveConfig {
    /// Applies one key=value setting. Unknown keys are errors so typos
    /// surface instead of silently using defaults.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "screen.width" => self.screen.width = parse_num(key, v)?,
            "screen.height" => self.screen.height = parse_num(key, v)?,
            "screen.y_origin" => {
                self.screen.y_origin = match v {
                    "top" => YOrigin::Top,
                    "bottom" => YOrigin::Bottom,
                    other => return Err(format!("screen.y_origin must be top|bottom, got {other:?}")),
                }
            }
            "aoi.tolerance" => self.screen.aoi_tolerance = parse_num(key, v)?,
            "aoi.min_size" => self.screen.min_aoi_size = parse_num(key, v)?,
            "coords" => self.coords = CoordSetting::parse(v)?,
            "col.timestamp" => self.columns.timestamp = v.into(),
            "col.gaze" => self.columns.gaze = v.into(),
            "col.gaze_x" => self.columns.gaze_x = v.into(),
            "col.gaze_y" => self.columns.gaze_y = v.into(),
            "col.event" => self.columns.event = v.into(),
            "col.level" => self.columns.level = v.into(),
            "col.aoi_name" => self.columns.aoi_name = v.into(),
            "col.aoi_x" => self.columns.aoi_x = v.into(),
            "col.aoi_y" => self.columns.aoi_y = v.into(),
            "col.aoi_w" => self.columns.aoi_w = v.into(),
            "col.aoi_h" => self.columns.aoi_h = v.into(),
            "detect.v_basic" => self.detection.v_basic = parse_num(key, v)?,
            "detect.v_advanced" => self.detection.v_advanced = parse_num(key, v)?,
            "detect.spatial_threshold" => self.detection.spatial_threshold = parse_num(key, v)?,
            "detect.min_duration_ms" => self.detection.min_duration_ms = parse_num(key, v)?,
            "detect.min_cluster_size" => self.detection.min_cluster_size = parse_num(key, v)?,
            "match.min_latency_ms" => self.matching.min_latency_ms = parse_num(key, v)?,
            "match.max_latency_ms" => self.matching.max_latency_ms = parse_num(key, v)?,
            "risk.relevance_critical" => self.assess.relevance_critical = parse_num(key, v)?,
            "risk.relevance_critical_weight" => {
                self.assess.relevance_critical_weight = parse_num(key, v)?
            }
            "risk.relevance_low" => self.assess.relevance_low = parse_num(key, v)?,
            "risk.relevance_low_weight" => self.assess.relevance_low_weight = parse_num(key, v)?,
            "risk.scatter_threshold" => self.assess.scatter_threshold = parse_num(key, v)?,
            "risk.scatter_weight" => self.assess.scatter_weight = parse_num(key, v)?,
            "risk.transitions_threshold" => {
                self.assess.transitions_threshold = parse_num(key, v)?
            }
            "risk.transitions_weight" => self.assess.transitions_weight = parse_num(key, v)?,
            "risk.hit_rate_threshold" => self.assess.hit_rate_threshold = parse_num(key, v)?,
            "risk.hit_rate_weight" => self.assess.hit_rate_weight = parse_num(key, v)?,
            "risk.urgency_high" => self.assess.urgency_high = parse_num(key, v)?,
            "risk.urgency_moderate" => self.assess.urgency_moderate = parse_num(key, v)?,
            "plan.focus_threshold" => self.assess.plan_focus_percent = parse_num(key, v)?,
            "plan.sustained_threshold" => self.assess.plan_sustained_percent = parse_num(key, v)?,
            "profile.scatter_anchor" => self.assess.profile_scatter_anchor = parse_num(key, v)?,
            "profile.scatter_range" => self.assess.profile_scatter_range = parse_num(key, v)?,
            "profile.efficiency_anchor" => {
                self.assess.profile_efficiency_anchor = parse_num(key, v)?
            }
            "profile.transitions_anchor" => {
                self.assess.profile_transitions_anchor = parse_num(key, v)?
            }
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Overlays every setting from a key=value file. Lines starting with
    /// `#` and blank lines are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{}: line {}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            self.set(key.trim(), value).map_err(|msg| {
                CliError::Config(format!("{}: line {}: {msg}", path.display(), lineno + 1))
            })?;
        }
        Ok(())
    }

    /// Checks every cross-field invariant.
    pub fn validate(&self) -> Result<(), CliError> {
        self.screen
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.detection
            .validate()
            .map_err(|_| CliError::Config("detection thresholds must be positive and v_advanced <= v_basic".into()))?;
        if !self.matching.validate() {
            return Err(CliError::Config(
                "match.min_latency_ms must be below match.max_latency_ms".into(),
            ));
        }
        if self.assess.profile_scatter_range <= 0.0
            || self.assess.profile_efficiency_anchor <= 0.0
            || self.assess.profile_transitions_anchor <= 0.0
        {
            return Err(CliError::Config("profile anchors must be positive".into()));
        }
        Ok(())
    }

    /// The full effective configuration as ordered key/value pairs — the
    /// `config` block echoed into every report.
    pub fn echo(&self) -> Vec<(String, String)> {
        let f = |x: f64| format!("{x}");
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("screen.width", self.screen.width.to_string());
        push("screen.height", self.screen.height.to_string());
        push(
            "screen.y_origin",
            match self.screen.y_origin {
                YOrigin::Top => "top".into(),
                YOrigin::Bottom => "bottom".into(),
            },
        );
        push("aoi.tolerance", f(self.screen.aoi_tolerance));
        push("aoi.min_size", f(self.screen.min_aoi_size));
        push("coords", self.coords.as_str().to_string());
        push("detect.v_basic", f(self.detection.v_basic));
        push("detect.v_advanced", f(self.detection.v_advanced));
        push("detect.spatial_threshold", f(self.detection.spatial_threshold));
        push("detect.min_duration_ms", self.detection.min_duration_ms.to_string());
        push("detect.min_cluster_size", self.detection.min_cluster_size.to_string());
        push("match.min_latency_ms", self.matching.min_latency_ms.to_string());
        push("match.max_latency_ms", self.matching.max_latency_ms.to_string());
        push("risk.relevance_critical", f(self.assess.relevance_critical));
        push(
            "risk.relevance_critical_weight",
            self.assess.relevance_critical_weight.to_string(),
        );
        push("risk.relevance_low", f(self.assess.relevance_low));
        push("risk.relevance_low_weight", self.assess.relevance_low_weight.to_string());
        push("risk.scatter_threshold", f(self.assess.scatter_threshold));
        push("risk.scatter_weight", self.assess.scatter_weight.to_string());
        push(
            "risk.transitions_threshold",
            self.assess.transitions_threshold.to_string(),
        );
        push("risk.transitions_weight", self.assess.transitions_weight.to_string());
        push("risk.hit_rate_threshold", f(self.assess.hit_rate_threshold));
        push("risk.hit_rate_weight", self.assess.hit_rate_weight.to_string());
        push("risk.urgency_high", self.assess.urgency_high.to_string());
        push("risk.urgency_moderate", self.assess.urgency_moderate.to_string());
        push("plan.focus_threshold", f(self.assess.plan_focus_percent));
        push("plan.sustained_threshold", f(self.assess.plan_sustained_percent));
        push("profile.scatter_anchor", f(self.assess.profile_scatter_anchor));
        push("profile.scatter_range", f(self.assess.profile_scatter_range));
        push("profile.efficiency_anchor", f(self.assess.profile_efficiency_anchor));
        push("profile.transitions_anchor", f(self.assess.profile_transitions_anchor));
        push("col.timestamp", self.columns.timestamp.clone());
        push("col.gaze", self.columns.gaze.clone());
        push("col.gaze_x", self.columns.gaze_x.clone());
        push("col.gaze_y", self.columns.gaze_y.clone());
        push("col.event", self.columns.event.clone());
        push("col.level", self.columns.level.clone());
        out
    }
}
