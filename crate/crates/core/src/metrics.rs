//! Task-performance, attention, and behavioral measures for one level.

use alloc::string::String;
use alloc::vec::Vec;

use crate::detect::{Fixation, Saccade};
use crate::ingest::{AoiMap, AoiRole, CleanSession, EventKind, GazeSample, TimelineEvent};
use crate::math;

/// Target-to-click latency window, ms. Both endpoints are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub min_latency_ms: u64,
    pub max_latency_ms: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            min_latency_ms: 522,
            max_latency_ms: 5000,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> bool {
        self.min_latency_ms < self.max_latency_ms
    }
}

/// One matched target/click pair (indices into the respective event lists
/// plus their timestamps).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchPair {
    pub target_index: usize,
    pub click_index: usize,
    pub target_ms: u64,
    pub click_ms: u64,
}

/// Result of greedy target-to-click matching.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub matched: usize,
    pub target_count: usize,
    /// Percent in [0, 100]; 0 when there were no targets at all.
    pub hit_rate: f64,
    /// True when the level had no targets, so the 0 hit rate is vacuous.
    pub no_targets: bool,
    pub pairs: Vec<MatchPair>,
}

/// Per-level aggregate of everything Algorithms 3 computes. Optional fields
/// are `None` when the defining event list was empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionMetrics {
    pub sample_count: usize,
    pub fixation_count: usize,
    pub saccade_count: usize,
    pub hit_rate: f64,
    pub matched: usize,
    pub target_count: usize,
    pub no_targets: bool,
    /// sigma_x + sigma_y of gaze positions, px (population stddev).
    pub attention_scatter: Option<f64>,
    /// Fraction of samples landing in bin AOIs, in [0, 1].
    pub task_relevance: Option<f64>,
    pub aoi_transitions: usize,
    /// |fixations| / |gaze points|, in [0, 1].
    pub gaze_efficiency: Option<f64>,
    pub avg_fixation_duration: Option<f64>,
    pub avg_saccade_amplitude: Option<f64>,
    /// Mean of per-saccade peak velocities, px/s.
    pub avg_saccade_velocity: Option<f64>,
    /// |fixations| / |saccades|; undefined without saccades.
    pub fix_sacc_ratio: Option<f64>,
    /// Sum of saccade amplitudes, px.
    pub scan_path: f64,
    pub processing_style: String,
    pub search_pattern: String,
}

/// Greedy in-order target/click matching: each target (ascending time)
/// takes the earliest unused click whose latency falls inside the window;
/// a click is used at most once. Zero targets is not an error — the hit
/// rate is 0 with `no_targets` set.
pub fn match_targets(
    targets: &[TimelineEvent],
    clicks: &[TimelineEvent],
    cfg: &MatchConfig,
) -> MatchOutcome {
    let mut used = alloc::vec![false; clicks.len()];
    let mut pairs = Vec::new();
    for (ti, t) in targets.iter().enumerate() {
        let found = clicks.iter().enumerate().find(|(ci, c)| {
            !used[*ci]
                && c.timestamp_ms >= t.timestamp_ms
                && (cfg.min_latency_ms..=cfg.max_latency_ms)
                    .contains(&(c.timestamp_ms - t.timestamp_ms))
        });
        if let Some((ci, c)) = found {
            used[ci] = true;
            pairs.push(MatchPair {
                target_index: ti,
                click_index: ci,
                target_ms: t.timestamp_ms,
                click_ms: c.timestamp_ms,
            });
        }
    }
    let matched = pairs.len();
    let no_targets = targets.is_empty();
    let hit_rate = if no_targets {
        0.0
    } else {
        matched as f64 / targets.len() as f64 * 100.0
    };
    MatchOutcome {
        matched,
        target_count: targets.len(),
        hit_rate,
        no_targets,
        pairs,
    }
}

/// Population standard deviation of x plus population standard deviation
/// of y, px. `None` on an empty stream.
pub fn attention_scatter(samples: &[GazeSample]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.x).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.y).sum::<f64>() / n;
    let var_x = samples.iter().map(|s| (s.x - mean_x) * (s.x - mean_x)).sum::<f64>() / n;
    let var_y = samples.iter().map(|s| (s.y - mean_y) * (s.y - mean_y)).sum::<f64>() / n;
    Some(math::sqrt(var_x) + math::sqrt(var_y))
}

/// Fraction of samples whose AOI lookup lands in a bin-role AOI. Uses the
/// same tolerance-inflated lookup as everything else.
pub fn task_relevance(samples: &[GazeSample], aoi: &AoiMap) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let in_bins = samples
        .iter()
        .filter(|s| {
            aoi.lookup(s.point())
                .and_then(|name| aoi.aois.iter().find(|a| a.name == name))
                .map(|a| a.role == AoiRole::Bin)
                .unwrap_or(false)
        })
        .count();
    Some(in_bins as f64 / samples.len() as f64)
}

/// Counts switches between AOIs on the sample-level label sequence:
/// samples outside every AOI are skipped, runs collapse, adjacent
/// differing names count one transition each.
pub fn aoi_transitions(samples: &[GazeSample], aoi: &AoiMap) -> usize {
    let mut transitions = 0usize;
    let mut last: Option<&str> = None;
    for s in samples {
        if let Some(name) = aoi.lookup(s.point()) {
            if let Some(prev) = last {
                if prev != name {
                    transitions += 1;
                }
            }
            last = Some(name);
        }
    }
    transitions
}

/// Fixation count over cleaned-sample count, in [0, 1].
pub fn gaze_efficiency(fixation_count: usize, sample_count: usize) -> Option<f64> {
    if sample_count == 0 {
        return None;
    }
    Some(fixation_count as f64 / sample_count as f64)
}

/// Scan-path length (sum of saccade amplitudes, an exact identity) and the
/// fixation/saccade ratio (`None` without saccades).
pub fn scan_path_and_ratio(fixations: &[Fixation], saccades: &[Saccade]) -> (f64, Option<f64>) {
    let scan_path = saccades.iter().map(|s| s.amplitude).sum::<f64>();
    let ratio = if saccades.is_empty() {
        None
    } else {
        Some(fixations.len() as f64 / saccades.len() as f64)
    };
    (scan_path, ratio)
}

const DEEP_PROCESSING_MS: f64 = 400.0;
const QUICK_SCANNING_MS: f64 = 200.0;
const BROAD_SEARCH_PX: f64 = 300.0;
const FOCUSED_EXAM_PX: f64 = 100.0;

/// Behavioral labels from average fixation duration and average saccade
/// amplitude. The bands the threshold rules leave open get explicit
/// neutral labels so the classifier is total; an empty event list for a
/// dimension yields "Insufficient data".
pub fn classify_behavior(fixations: &[Fixation], saccades: &[Saccade]) -> (String, String) {
    let processing = match mean(fixations.iter().map(|f| f.duration_ms as f64)) {
        None => "Insufficient data",
        Some(d) if d > DEEP_PROCESSING_MS => "Deep processing/difficulty",
        Some(d) if d < QUICK_SCANNING_MS => "Quick scanning",
        Some(_) => "Moderate processing",
    };
    let search = match mean(saccades.iter().map(|s| s.amplitude)) {
        None => "Insufficient data",
        Some(a) if a > BROAD_SEARCH_PX => "Broad visual search",
        Some(a) if a < FOCUSED_EXAM_PX => "Focused examination",
        Some(_) => "Mixed search",
    };
    (String::from(processing), String::from(search))
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        None
    } else {
        Some(sum / n as f64)
    }
}

/// Splits a level's timeline into its target and click event lists,
/// preserving order.
pub fn targets_and_clicks(events: &[TimelineEvent]) -> (Vec<TimelineEvent>, Vec<TimelineEvent>) {
    let targets = events
        .iter()
        .filter(|e| e.kind == EventKind::Target)
        .cloned()
        .collect();
    let clicks = events
        .iter()
        .filter(|e| e.kind == EventKind::Click)
        .cloned()
        .collect();
    (targets, clicks)
}

/// Runs every per-level measure over a cleaned session and its detected
/// events.
pub fn compute_session_metrics(
    session: &CleanSession,
    fixations: &[Fixation],
    saccades: &[Saccade],
    cfg: &MatchConfig,
) -> SessionMetrics {
    let (targets, clicks) = targets_and_clicks(&session.events);
    let outcome = match_targets(&targets, &clicks, cfg);
    let (scan_path, fix_sacc_ratio) = scan_path_and_ratio(fixations, saccades);
    let (processing_style, search_pattern) = classify_behavior(fixations, saccades);
    SessionMetrics {
        sample_count: session.samples.len(),
        fixation_count: fixations.len(),
        saccade_count: saccades.len(),
        hit_rate: outcome.hit_rate,
        matched: outcome.matched,
        target_count: outcome.target_count,
        no_targets: outcome.no_targets,
        attention_scatter: attention_scatter(&session.samples),
        task_relevance: task_relevance(&session.samples, &session.aoi_map),
        aoi_transitions: aoi_transitions(&session.samples, &session.aoi_map),
        gaze_efficiency: gaze_efficiency(fixations.len(), session.samples.len()),
        avg_fixation_duration: mean(fixations.iter().map(|f| f.duration_ms as f64)),
        avg_saccade_amplitude: mean(saccades.iter().map(|s| s.amplitude)),
        avg_saccade_velocity: mean(saccades.iter().map(|s| s.peak_velocity)),
        fix_sacc_ratio,
        scan_path,
        processing_style,
        search_pattern,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{AoiRect, ScreenConfig};
    use alloc::string::ToString;
    use alloc::vec;

    fn event(t: u64, kind: EventKind) -> TimelineEvent {
        TimelineEvent {
            timestamp_ms: t,
            kind,
            payload: String::new(),
        }
    }

    fn sample(t: u64, x: f64, y: f64) -> GazeSample {
        GazeSample {
            timestamp_ms: t,
            x,
            y,
            level: 1,
            event: None,
        }
    }

    #[test]
    fn match_inside_the_window() {
        let out = match_targets(
            &[event(1000, EventKind::Target)],
            &[event(1600, EventKind::Click)],
            &MatchConfig::default(),
        );
        assert_eq!(out.matched, 1);
        assert_eq!(out.hit_rate, 100.0);
    }

    #[test]
    fn match_below_minimum_latency_fails() {
        let out = match_targets(
            &[event(1000, EventKind::Target)],
            &[event(1400, EventKind::Click)],
            &MatchConfig::default(),
        );
        assert_eq!(out.matched, 0);
        assert_eq!(out.hit_rate, 0.0);
        assert!(!out.no_targets);
    }

    #[test]
    fn match_window_endpoints_are_inclusive() {
        let cfg = MatchConfig::default();
        for (latency, expect) in [(521u64, 0usize), (522, 1), (5000, 1), (5001, 0)] {
            let out = match_targets(
                &[event(1000, EventKind::Target)],
                &[event(1000 + latency, EventKind::Click)],
                &cfg,
            );
            assert_eq!(out.matched, expect, "latency {latency}");
        }
    }

    #[test]
    fn greedy_gives_a_shared_click_to_the_earliest_target() {
        let out = match_targets(
            &[event(0, EventKind::Target), event(100, EventKind::Target)],
            &[event(700, EventKind::Click)],
            &MatchConfig::default(),
        );
        assert_eq!(out.matched, 1);
        assert_eq!(out.pairs[0].target_index, 0);
        assert_eq!(out.hit_rate, 50.0);
    }

    #[test]
    fn no_targets_is_flagged_not_an_error() {
        let out = match_targets(&[], &[event(700, EventKind::Click)], &MatchConfig::default());
        assert!(out.no_targets);
        assert_eq!(out.hit_rate, 0.0);
    }

    #[test]
    fn scatter_of_identical_samples_is_zero() {
        let s = vec![sample(0, 7.0, 7.0), sample(1, 7.0, 7.0)];
        assert_eq!(attention_scatter(&s), Some(0.0));
    }

    #[test]
    fn scatter_matches_hand_computed_stddev() {
        // x in {0,10,20}, y constant: sigma_x = sqrt(200/3), sigma_y = 0.
        let s = vec![sample(0, 0.0, 5.0), sample(1, 10.0, 5.0), sample(2, 20.0, 5.0)];
        let got = attention_scatter(&s).unwrap();
        assert!((got - math::sqrt(200.0 / 3.0)).abs() < 1e-12);
        assert!((got - 8.165).abs() < 1e-3);
    }

    #[test]
    fn scatter_of_empty_stream_is_undefined() {
        assert_eq!(attention_scatter(&[]), None);
    }

    fn bin_map() -> AoiMap {
        let screen = ScreenConfig::default();
        let (map, _) = AoiMap::new(
            vec![
                AoiRect::new("a", 100.0, 100.0, 100.0, 100.0),
                AoiRect::new("b", 800.0, 100.0, 100.0, 100.0),
            ],
            &screen,
        );
        map
    }

    #[test]
    fn relevance_counts_bin_hits() {
        let map = bin_map();
        let s = vec![
            sample(0, 150.0, 150.0),
            sample(1, 850.0, 150.0),
            sample(2, 150.0, 160.0),
            sample(3, 500.0, 900.0), // outside
        ];
        assert_eq!(task_relevance(&s, &map), Some(0.75));
    }

    #[test]
    fn relevance_without_aois_is_zero() {
        let s = vec![sample(0, 1.0, 1.0)];
        assert_eq!(task_relevance(&s, &AoiMap::default()), Some(0.0));
    }

    #[test]
    fn relevance_skips_non_bin_aois() {
        let screen = ScreenConfig::default();
        let mut rect = AoiRect::new("hud", 100.0, 100.0, 100.0, 100.0);
        rect.role = AoiRole::Other;
        let (map, _) = AoiMap::new(vec![rect], &screen);
        let s = vec![sample(0, 150.0, 150.0)];
        assert_eq!(task_relevance(&s, &map), Some(0.0));
    }

    #[test]
    fn transitions_collapse_runs_and_skip_gaps() {
        let map = bin_map();
        let a = (150.0, 150.0);
        let b = (850.0, 150.0);
        let outside = (500.0, 900.0);
        // A A B B A -> 2
        let s: Vec<_> = [a, a, b, b, a]
            .iter()
            .enumerate()
            .map(|(i, (x, y))| sample(i as u64, *x, *y))
            .collect();
        assert_eq!(aoi_transitions(&s, &map), 2);
        // A gap A -> 0
        let s: Vec<_> = [a, outside, a]
            .iter()
            .enumerate()
            .map(|(i, (x, y))| sample(i as u64, *x, *y))
            .collect();
        assert_eq!(aoi_transitions(&s, &map), 0);
        // A B A B -> 3
        let s: Vec<_> = [a, b, a, b]
            .iter()
            .enumerate()
            .map(|(i, (x, y))| sample(i as u64, *x, *y))
            .collect();
        assert_eq!(aoi_transitions(&s, &map), 3);
    }

    #[test]
    fn efficiency_is_a_plain_ratio() {
        assert_eq!(gaze_efficiency(0, 20), Some(0.0));
        assert_eq!(gaze_efficiency(3, 20), Some(0.15));
        assert_eq!(gaze_efficiency(11, 2200), Some(0.005));
        assert_eq!(gaze_efficiency(1, 0), None);
    }

    fn fixation_of(duration_ms: u64) -> Fixation {
        Fixation {
            center: crate::Point::new(0.0, 0.0),
            start_ms: 0,
            end_ms: duration_ms,
            duration_ms,
            dispersion: 0.0,
            sample_count: 3,
            dominant_aoi: None,
        }
    }

    fn saccade_of(amplitude: f64) -> Saccade {
        Saccade {
            amplitude,
            peak_velocity: 1000.0,
            duration_ms: 50,
            start_ms: 0,
            end_ms: 50,
            from: crate::Point::new(0.0, 0.0),
            to: crate::Point::new(amplitude, 0.0),
            degenerate: false,
        }
    }

    #[test]
    fn scan_path_is_the_amplitude_sum() {
        let fixations: Vec<_> = (0..11).map(|_| fixation_of(500)).collect();
        let saccades: Vec<_> = (0..19).map(|_| saccade_of(735.2)).collect();
        let (path, ratio) = scan_path_and_ratio(&fixations, &saccades);
        assert!((path - 19.0 * 735.2).abs() < 1e-9);
        assert!((ratio.unwrap() - 11.0 / 19.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_without_saccades_is_undefined() {
        let (path, ratio) = scan_path_and_ratio(&[fixation_of(100)], &[]);
        assert_eq!(path, 0.0);
        assert_eq!(ratio, None);
    }

    #[test]
    fn behavior_labels_follow_the_thresholds() {
        let deep = vec![fixation_of(7277)];
        let quick = vec![fixation_of(150)];
        let broad = vec![saccade_of(735.2)];
        let focused = vec![saccade_of(50.0)];
        assert_eq!(classify_behavior(&deep, &broad).0, "Deep processing/difficulty");
        assert_eq!(classify_behavior(&quick, &focused).0, "Quick scanning");
        assert_eq!(classify_behavior(&deep, &broad).1, "Broad visual search");
        assert_eq!(classify_behavior(&quick, &focused).1, "Focused examination");
    }

    #[test]
    fn behavior_middle_bands_and_empty_lists() {
        let moderate = vec![fixation_of(300)];
        let mixed = vec![saccade_of(200.0)];
        let (p, s) = classify_behavior(&moderate, &mixed);
        assert_eq!(p, "Moderate processing");
        assert_eq!(s, "Mixed search");
        let (p, s) = classify_behavior(&[], &[]);
        assert_eq!(p, "Insufficient data");
        assert_eq!(s, "Insufficient data");
        // Boundary values fall in the neutral bands (rules are strict).
        assert_eq!(classify_behavior(&[fixation_of(400)], &[]).0, "Moderate processing");
        assert_eq!(classify_behavior(&[fixation_of(200)], &[]).0, "Moderate processing");
        assert_eq!(classify_behavior(&[], &[saccade_of(300.0)]).1, "Mixed search".to_string());
        assert_eq!(classify_behavior(&[], &[saccade_of(100.0)]).1, "Mixed search".to_string());
    }
}
