//! Synth spec and ground-truth sidecar formats.
//!
//! A spec is key=value text with repeatable structured lines:
//!
//! ```text
//! seed = 7
//! level = 1
//! jump_velocity = 2500
//! sampling_interval_ms = 50
//! noise_sigma = 0
//! cluster = 400 300 8 7 600      # cx cy radius sample_count dwell_ms
//! aoi = glass_bin 320 220 160 160
//! target = 100 600               # at_ms latency_ms ('-' for no click)
//! ```

use std::fs;
use std::path::Path;

use gazemetry_core::ingest::AoiRect;
use gazemetry_core::synth::{GroundTruth, PlantedCluster, PlantedTarget, SynthSpec};
use gazemetry_core::Point;

use crate::error::CliError;

pub fn read_spec(path: &Path) -> Result<SynthSpec, CliError> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::SynthSpec(e.to_string()))?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<SynthSpec, CliError> {
    let mut spec = SynthSpec {
        clusters: vec![],
        aois: vec![],
        targets: vec![],
        ..SynthSpec::demo()
    };
    let err = |line: usize, msg: String| CliError::SynthSpec(format!("line {line}: {msg}"));
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(i + 1, format!("expected key=value, got {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        let parts: Vec<&str> = value.split_whitespace().collect();
        let num = |text: &str| -> Result<f64, CliError> {
            text.parse::<f64>()
                .map_err(|_| err(i + 1, format!("bad number {text:?}")))
        };
        match key {
            "seed" => spec.seed = value.parse().map_err(|_| err(i + 1, "bad seed".into()))?,
            "level" => spec.level = value.parse().map_err(|_| err(i + 1, "bad level".into()))?,
            "screen.width" => {
                spec.screen.width = value.parse().map_err(|_| err(i + 1, "bad width".into()))?
            }
            "screen.height" => {
                spec.screen.height = value.parse().map_err(|_| err(i + 1, "bad height".into()))?
            }
            "jump_velocity" => spec.jump_velocity = num(value)?,
            "sampling_interval_ms" => {
                spec.sampling_interval_ms =
                    value.parse().map_err(|_| err(i + 1, "bad interval".into()))?
            }
            "noise_sigma" => spec.noise_sigma = num(value)?,
            "cluster" => {
                if parts.len() != 5 {
                    return Err(err(i + 1, "cluster needs `cx cy radius count dwell_ms`".into()));
                }
                spec.clusters.push(PlantedCluster {
                    center: Point::new(num(parts[0])?, num(parts[1])?),
                    radius: num(parts[2])?,
                    sample_count: parts[3]
                        .parse()
                        .map_err(|_| err(i + 1, "bad sample count".into()))?,
                    dwell_ms: parts[4].parse().map_err(|_| err(i + 1, "bad dwell".into()))?,
                });
            }
            "aoi" => {
                if parts.len() != 5 {
                    return Err(err(i + 1, "aoi needs `name x y w h`".into()));
                }
                spec.aois.push(AoiRect::new(
                    parts[0],
                    num(parts[1])?,
                    num(parts[2])?,
                    num(parts[3])?,
                    num(parts[4])?,
                ));
            }
            "target" => {
                if parts.len() != 2 {
                    return Err(err(i + 1, "target needs `at_ms latency_ms|-`".into()));
                }
                let at_ms = parts[0].parse().map_err(|_| err(i + 1, "bad target time".into()))?;
                let click_latency_ms = if parts[1] == "-" {
                    None
                } else {
                    Some(parts[1].parse().map_err(|_| err(i + 1, "bad latency".into()))?)
                };
                spec.targets.push(PlantedTarget { at_ms, click_latency_ms });
            }
            other => return Err(err(i + 1, format!("unknown spec key {other:?}"))),
        }
    }
    Ok(spec)
}

/// Renders the ground truth as a text sidecar (same key=value style as the
/// spec, one `cluster`/`hop` line per planted item).
pub fn render_ground_truth(truth: &GroundTruth) -> String {
    let mut out = String::new();
    out.push_str(&format!("intended_matched = {}\n", truth.intended_matched));
    out.push_str(&format!("intended_hit_rate = {:.1}\n", truth.intended_hit_rate));
    for c in &truth.clusters {
        out.push_str(&format!(
            "cluster = {:.3} {:.3} {} {} {}\n",
            c.centroid.x, c.centroid.y, c.start_ms, c.duration_ms, c.sample_count
        ));
    }
    for (from, to) in &truth.saccade_hops {
        out.push_str(&format!(
            "hop = {:.3} {:.3} {:.3} {:.3}\n",
            from.x, from.y, to.x, to.y
        ));
    }
    out
}
