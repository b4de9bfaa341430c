//! Property tests for the per-level measures, each checked against an
//! independent brute-force re-computation.

use gazemetry_core::ingest::{AoiMap, AoiRect, EventKind, TimelineEvent};
use gazemetry_core::metrics::{
    aoi_transitions, attention_scatter, match_targets, scan_path_and_ratio, task_relevance,
    MatchConfig,
};
use gazemetry_core::synth::SplitMix64;
use gazemetry_core::{GazeSample, ScreenConfig};
use proptest::prelude::*;

fn event(t: u64, kind: EventKind) -> TimelineEvent {
    TimelineEvent {
        timestamp_ms: t,
        kind,
        payload: String::new(),
    }
}

/// Brute-force greedy matcher, written independently of the library path:
/// walks targets in order and scans clicks front-to-back.
fn brute_force_greedy(
    targets: &[u64],
    clicks: &[u64],
    min: u64,
    max: u64,
) -> Vec<(usize, usize)> {
    let mut used = vec![false; clicks.len()];
    let mut pairs = Vec::new();
    for (ti, &t) in targets.iter().enumerate() {
        for (ci, &c) in clicks.iter().enumerate() {
            if used[ci] || c < t {
                continue;
            }
            let latency = c - t;
            if latency >= min && latency <= max {
                used[ci] = true;
                pairs.push((ti, ci));
                break;
            }
        }
    }
    pairs
}

proptest! {
    #[test]
    fn matching_agrees_with_brute_force_and_never_reuses_clicks(
        seed in any::<u64>(),
        n_targets in 0usize..25,
        n_clicks in 0usize..25,
    ) {
        let mut rng = SplitMix64::new(seed);
        let mut targets: Vec<u64> = (0..n_targets).map(|_| rng.next_u64() % 30_000).collect();
        let mut clicks: Vec<u64> = (0..n_clicks).map(|_| rng.next_u64() % 30_000).collect();
        targets.sort_unstable();
        clicks.sort_unstable();
        let cfg = MatchConfig::default();
        let target_events: Vec<_> = targets.iter().map(|&t| event(t, EventKind::Target)).collect();
        let click_events: Vec<_> = clicks.iter().map(|&c| event(c, EventKind::Click)).collect();
        let outcome = match_targets(&target_events, &click_events, &cfg);

        let expected = brute_force_greedy(&targets, &clicks, cfg.min_latency_ms, cfg.max_latency_ms);
        let got: Vec<(usize, usize)> = outcome.pairs.iter().map(|p| (p.target_index, p.click_index)).collect();
        prop_assert_eq!(got, expected);

        // injective click usage and in-window latency on every pair
        let mut seen = std::collections::HashSet::new();
        for p in &outcome.pairs {
            prop_assert!(seen.insert(p.click_index));
            let latency = p.click_ms - p.target_ms;
            prop_assert!(latency >= cfg.min_latency_ms && latency <= cfg.max_latency_ms);
        }
        if outcome.target_count > 0 {
            let expect_rate = outcome.matched as f64 / outcome.target_count as f64 * 100.0;
            prop_assert_eq!(outcome.hit_rate, expect_rate);
        } else {
            prop_assert!(outcome.no_targets);
            prop_assert_eq!(outcome.hit_rate, 0.0);
        }
    }

    #[test]
    fn scatter_matches_a_naive_two_pass_stddev(
        coords in proptest::collection::vec((0.0f64..1920.0, 0.0f64..1080.0), 1..80)
    ) {
        let samples: Vec<GazeSample> = coords
            .iter()
            .enumerate()
            .map(|(i, (x, y))| GazeSample {
                timestamp_ms: i as u64,
                x: *x,
                y: *y,
                level: 1,
                event: None,
            })
            .collect();
        let got = attention_scatter(&samples).unwrap();
        let n = samples.len() as f64;
        let mx = samples.iter().map(|s| s.x).sum::<f64>() / n;
        let my = samples.iter().map(|s| s.y).sum::<f64>() / n;
        let vx = samples.iter().map(|s| (s.x - mx).powi(2)).sum::<f64>() / n;
        let vy = samples.iter().map(|s| (s.y - my).powi(2)).sum::<f64>() / n;
        let naive = vx.sqrt() + vy.sqrt();
        prop_assert!((got - naive).abs() < 1e-9);
    }

    #[test]
    fn transitions_match_a_brute_force_label_walk(
        points in proptest::collection::vec((0.0f64..1920.0, 0.0f64..1080.0), 0..120)
    ) {
        let screen = ScreenConfig::default();
        let (map, _) = AoiMap::new(
            vec![
                AoiRect::new("a", 100.0, 100.0, 300.0, 300.0),
                AoiRect::new("b", 900.0, 100.0, 300.0, 300.0),
                AoiRect::new("c", 500.0, 700.0, 300.0, 300.0),
            ],
            &screen,
        );
        let samples: Vec<GazeSample> = points
            .iter()
            .enumerate()
            .map(|(i, (x, y))| GazeSample {
                timestamp_ms: i as u64,
                x: *x,
                y: *y,
                level: 1,
                event: None,
            })
            .collect();
        // brute force: full label list, drop gaps, collapse runs, count pairs
        let labels: Vec<&str> = samples.iter().filter_map(|s| map.lookup(s.point())).collect();
        let mut collapsed: Vec<&str> = Vec::new();
        for l in labels {
            if collapsed.last() != Some(&l) {
                collapsed.push(l);
            }
        }
        let expected = collapsed.len().saturating_sub(1);
        prop_assert_eq!(aoi_transitions(&samples, &map), expected);
    }

    #[test]
    fn relevance_and_bounds(
        points in proptest::collection::vec((0.0f64..1920.0, 0.0f64..1080.0), 1..100)
    ) {
        let screen = ScreenConfig::default();
        let (map, _) = AoiMap::new(
            vec![AoiRect::new("bin", 400.0, 300.0, 400.0, 300.0)],
            &screen,
        );
        let samples: Vec<GazeSample> = points
            .iter()
            .enumerate()
            .map(|(i, (x, y))| GazeSample {
                timestamp_ms: i as u64,
                x: *x,
                y: *y,
                level: 1,
                event: None,
            })
            .collect();
        let r = task_relevance(&samples, &map).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
        let hits = samples.iter().filter(|s| map.lookup(s.point()).is_some()).count();
        prop_assert!((r - hits as f64 / samples.len() as f64).abs() < 1e-12);
    }
}

#[test]
fn scan_path_is_exactly_the_amplitude_sum() {
    use gazemetry_core::detect::Saccade;
    use gazemetry_core::Point;
    let saccades: Vec<Saccade> = (1..=19)
        .map(|i| Saccade {
            amplitude: 735.2 + 0.01 * i as f64,
            peak_velocity: 500.0,
            duration_ms: 50,
            start_ms: 0,
            end_ms: 50,
            from: Point::new(0.0, 0.0),
            to: Point::new(1.0, 1.0),
            degenerate: false,
        })
        .collect();
    let (path, _) = scan_path_and_ratio(&[], &saccades);
    let manual: f64 = saccades.iter().map(|s| s.amplitude).sum();
    assert_eq!(path, manual);
}
