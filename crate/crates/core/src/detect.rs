//! Fixation and saccade detection.
//!
//! Two classifiers run over the same stream: a per-pair velocity-threshold
//! labeling (basic I-VT) used for diagnostics, and a single-pass spatial
//! clustering that produces the fixation/saccade event lists consumed by
//! every downstream metric.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ingest::{AoiMap, GazeSample, Point};
use crate::math;

/// Detection thresholds. Defaults are the tuned values for this pipeline;
/// every field is overridable through the CLI config.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    /// Basic I-VT velocity threshold, px/s. At or below is a fixation.
    pub v_basic: f64,
    /// Clustering velocity threshold, px/s. Strictly below joins a cluster.
    pub v_advanced: f64,
    /// Max distance from a sample to the running cluster centroid, px.
    pub spatial_threshold: f64,
    /// Minimum fixation duration, ms.
    pub min_duration_ms: u64,
    /// Minimum samples per fixation cluster.
    pub min_cluster_size: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            v_basic: 721.0,
            v_advanced: 300.0,
            spatial_threshold: 50.0,
            min_duration_ms: 100,
            min_cluster_size: 3,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<(), DetectError> {
        let positive = self.v_basic > 0.0
            && self.v_advanced > 0.0
            && self.spatial_threshold > 0.0
            && self.min_duration_ms > 0
            && self.min_cluster_size > 0;
        if !positive || self.v_advanced > self.v_basic {
            return Err(DetectError::InvalidConfig);
        }
        Ok(())
    }
}

/// A period of stable gaze.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixation {
    /// Arithmetic mean of member sample positions, px.
    pub center: Point,
    pub start_ms: u64,
    pub end_ms: u64,
    pub duration_ms: u64,
    /// x-range + y-range of member samples, px (I-DT convention).
    pub dispersion: f64,
    pub sample_count: usize,
    /// Modal AOI of the member samples, if any member hits an AOI.
    pub dominant_aoi: Option<String>,
}

/// A rapid movement between stable-gaze periods.
#[derive(Debug, Clone, PartialEq)]
pub struct Saccade {
    /// Euclidean distance from segment start to segment end, px.
    pub amplitude: f64,
    /// Max finite inter-sample velocity within the segment, px/s.
    pub peak_velocity: f64,
    pub duration_ms: u64,
    pub start_ms: u64,
    pub end_ms: u64,
    pub from: Point,
    pub to: Point,
    /// True when the segment had fewer than two samples and all motion
    /// fields are zeroed.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    Fixation,
    Saccade,
}

impl LabelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelKind::Fixation => "fixation",
            LabelKind::Saccade => "saccade",
        }
    }
}

/// Basic I-VT label for one sample pair. `index` is the 0-based position of
/// the later sample; the first sample of a stream has no label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleLabel {
    pub index: usize,
    pub kind: LabelKind,
    pub velocity: f64,
}

/// Per-sample clustering trace for the debug dump: which greedy cluster a
/// sample landed in (rejected clusters included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleTrace {
    pub index: usize,
    pub timestamp_ms: u64,
    /// None for the first sample of the stream.
    pub velocity: Option<f64>,
    pub basic: Option<LabelKind>,
    pub cluster_id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DetectError {
    /// `curr` is earlier than `prev`.
    OutOfOrder,
    /// Thresholds violate their invariants.
    InvalidConfig,
}

impl fmt::Display for DetectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectError::OutOfOrder => write!(f, "samples out of chronological order"),
            DetectError::InvalidConfig => write!(f, "invalid detection thresholds"),
        }
    }
}

/// Point-to-point gaze velocity in px/s: Euclidean pixel distance over
/// elapsed seconds. A zero time step yields the +infinity sentinel, which
/// downstream classification treats as a saccade.
pub fn velocity(prev: &GazeSample, curr: &GazeSample) -> Result<f64, DetectError> {
    if curr.timestamp_ms < prev.timestamp_ms {
        return Err(DetectError::OutOfOrder);
    }
    Ok(velocity_unchecked(prev, curr))
}

/// Same as [`velocity`] but treats inverted timestamps as a zero step.
/// [`CleanSession`](crate::ingest::CleanSession) streams are time-ordered,
/// so the two only differ on contract violations.
fn velocity_unchecked(prev: &GazeSample, curr: &GazeSample) -> f64 {
    let dt_ms = curr.timestamp_ms.saturating_sub(prev.timestamp_ms);
    if dt_ms == 0 {
        return f64::INFINITY;
    }
    let dx = curr.x - prev.x;
    let dy = curr.y - prev.y;
    math::sqrt(dx * dx + dy * dy) / (dt_ms as f64 / 1000.0)
}

/// Basic I-VT: labels every sample pair fixation or saccade by comparing
/// its velocity against `v_basic` (inclusive: exactly `v_basic` is a
/// fixation). Streams shorter than two samples yield no labels.
pub fn classify_ivt(samples: &[GazeSample], cfg: &DetectionConfig) -> Vec<SampleLabel> {
    samples
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let v = velocity_unchecked(&pair[0], &pair[1]);
            SampleLabel {
                index: i + 1,
                kind: if v <= cfg.v_basic {
                    LabelKind::Fixation
                } else {
                    LabelKind::Saccade
                },
                velocity: v,
            }
        })
        .collect()
}

/// Computes a fixation from a finalized cluster.
///
/// Center is the arithmetic mean of member positions; dispersion is
/// x-range + y-range; the dominant AOI is the most frequent non-empty AOI
/// hit among members (ties go to the earliest member hit).
pub fn finalize_cluster(members: &[GazeSample], aoi: &AoiMap) -> Fixation {
    assert!(
        !members.is_empty(),
        "finalize_cluster needs a non-empty cluster meeting the configured minima"
    );
    let n = members.len() as f64;
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for m in members {
        sx += m.x;
        sy += m.y;
        min_x = min_x.min(m.x);
        max_x = max_x.max(m.x);
        min_y = min_y.min(m.y);
        max_y = max_y.max(m.y);
    }
    let start = members[0].timestamp_ms;
    let end = members[members.len() - 1].timestamp_ms;

    // Modal AOI over members that hit one, first-hit order breaking ties.
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for m in members {
        if let Some(name) = aoi.lookup(m.point()) {
            match counts.iter_mut().find(|(n, _)| *n == name) {
                Some((_, c)) => *c += 1,
                None => counts.push((name, 1)),
            }
        }
    }
    let dominant_aoi = counts
        .iter()
        .max_by_key(|(_, c)| *c)
        .map(|(n, _)| String::from(*n));

    Fixation {
        center: Point::new(sx / n, sy / n),
        start_ms: start,
        end_ms: end,
        duration_ms: end - start,
        dispersion: (max_x - min_x) + (max_y - min_y),
        sample_count: members.len(),
        dominant_aoi,
    }
}

/// Summarizes a saccade segment: amplitude is the Euclidean start-to-end
/// distance, peak velocity the max finite inter-sample velocity within the
/// segment (zero-dt pairs are skipped). Segments shorter than two samples
/// produce a zero-field saccade flagged degenerate.
pub fn summarize_saccade(segment: &[GazeSample]) -> Saccade {
    if segment.len() < 2 {
        let (t, p) = segment
            .first()
            .map(|s| (s.timestamp_ms, s.point()))
            .unwrap_or((0, Point::default()));
        return Saccade {
            amplitude: 0.0,
            peak_velocity: 0.0,
            duration_ms: 0,
            start_ms: t,
            end_ms: t,
            from: p,
            to: p,
            degenerate: true,
        };
    }
    let first = &segment[0];
    let last = &segment[segment.len() - 1];
    let mut peak = 0.0f64;
    for pair in segment.windows(2) {
        let v = velocity_unchecked(&pair[0], &pair[1]);
        if v.is_finite() {
            peak = peak.max(v);
        }
    }
    Saccade {
        amplitude: first.point().distance_to(last.point()),
        peak_velocity: peak,
        duration_ms: last.timestamp_ms - first.timestamp_ms,
        start_ms: first.timestamp_ms,
        end_ms: last.timestamp_ms,
        from: first.point(),
        to: last.point(),
        degenerate: false,
    }
}

/// Greedy single-pass clustering over a cleaned stream.
///
/// The first sample seeds the first cluster. Each later sample joins the
/// open cluster iff its velocity is strictly below `v_advanced` and its
/// distance to the running centroid is at most `spatial_threshold`.
/// Otherwise the open cluster closes: it becomes a fixation when it has at
/// least `min_cluster_size` samples spanning at least `min_duration_ms`,
/// one saccade is recorded for the break, and the current sample seeds a
/// new cluster. A trailing open cluster meeting both minima is finalized
/// at end of stream.
///
/// Each break's saccade runs from the last sample already covered by an
/// emitted event through the breaking sample, so the samples of rejected
/// clusters are absorbed into the enclosing saccade segment. Boundary
/// samples are shared between a fixation and its adjacent saccade.
pub fn detect_events(
    samples: &[GazeSample],
    cfg: &DetectionConfig,
    aoi: &AoiMap,
) -> (Vec<Fixation>, Vec<Saccade>) {
    let (f, s, _) = detect_events_traced(samples, cfg, aoi);
    (f, s)
}

/// [`detect_events`] plus the per-sample trace used by the debug dump.
pub fn detect_events_traced(
    samples: &[GazeSample],
    cfg: &DetectionConfig,
    aoi: &AoiMap,
) -> (Vec<Fixation>, Vec<Saccade>, Vec<SampleTrace>) {
    let mut fixations = Vec::new();
    let mut saccades = Vec::new();
    let mut traces = Vec::with_capacity(samples.len());
    if samples.is_empty() {
        return (fixations, saccades, traces);
    }

    let mut cluster_start = 0usize; // clusters are contiguous index runs
    let mut sum_x = samples[0].x;
    let mut sum_y = samples[0].y;
    let mut cluster_id = 0usize;
    // Index of the last sample covered by an emitted event, if any.
    let mut covered_through: Option<usize> = None;

    traces.push(SampleTrace {
        index: 0,
        timestamp_ms: samples[0].timestamp_ms,
        velocity: None,
        basic: None,
        cluster_id,
    });

    let close_cluster = |start: usize,
                             end: usize,
                             breaker: usize,
                             covered: &mut Option<usize>,
                             fixations: &mut Vec<Fixation>,
                             saccades: &mut Vec<Saccade>| {
        let members = &samples[start..=end];
        let duration = members[members.len() - 1].timestamp_ms - members[0].timestamp_ms;
        if members.len() >= cfg.min_cluster_size && duration >= cfg.min_duration_ms {
            fixations.push(finalize_cluster(members, aoi));
            *covered = Some(end);
        }
        let seg_start = covered.unwrap_or(start);
        saccades.push(summarize_saccade(&samples[seg_start..=breaker]));
        *covered = Some(breaker);
    };

    for i in 1..samples.len() {
        let v = velocity_unchecked(&samples[i - 1], &samples[i]);
        let n = (i - cluster_start) as f64;
        let dist = Point::new(sum_x / n, sum_y / n).distance_to(samples[i].point());
        if v < cfg.v_advanced && dist <= cfg.spatial_threshold {
            sum_x += samples[i].x;
            sum_y += samples[i].y;
        } else {
            close_cluster(
                cluster_start,
                i - 1,
                i,
                &mut covered_through,
                &mut fixations,
                &mut saccades,
            );
            cluster_start = i;
            sum_x = samples[i].x;
            sum_y = samples[i].y;
            cluster_id += 1;
        }
        traces.push(SampleTrace {
            index: i,
            timestamp_ms: samples[i].timestamp_ms,
            velocity: Some(v),
            basic: Some(if v <= cfg.v_basic {
                LabelKind::Fixation
            } else {
                LabelKind::Saccade
            }),
            cluster_id,
        });
    }

    // Trailing open cluster.
    let members = &samples[cluster_start..];
    let duration = members[members.len() - 1].timestamp_ms - members[0].timestamp_ms;
    if members.len() >= cfg.min_cluster_size && duration >= cfg.min_duration_ms {
        fixations.push(finalize_cluster(members, aoi));
    }

    (fixations, saccades, traces)
}
