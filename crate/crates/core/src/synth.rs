//! Synthetic session generation with planted ground truth, plus an
//! independent brute-force I-VT oracle for validating the detector.
//!
//! Streams are produced by a SplitMix64 generator, so a given seed yields
//! the same session on every platform.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::detect::LabelKind;
use crate::ingest::{AoiMap, AoiRect, CleanSession, EventKind, GazeSample, Point, ScreenConfig, TimelineEvent};
use crate::metrics::MatchConfig;

/// SplitMix64: a well-known, tiny, seedable generator. Used for all
/// synthetic randomness so streams are reproducible from the seed alone.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// One planted stable-gaze cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCluster {
    pub center: Point,
    /// Max distance of generated points from the center, px. Keep at or
    /// below half the detection spatial threshold for guaranteed recovery.
    pub radius: f64,
    pub sample_count: usize,
    /// Planted duration; the realized first-to-last span equals it.
    pub dwell_ms: u64,
}

/// A planted target and (optionally) the click that answers it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedTarget {
    pub at_ms: u64,
    pub click_latency_ms: Option<u64>,
}

/// Recipe for a deterministic synthetic session.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub level: u32,
    pub screen: ScreenConfig,
    pub clusters: Vec<PlantedCluster>,
    /// Speed of the single-hop jump between consecutive clusters, px/s.
    pub jump_velocity: f64,
    /// Base sample spacing, ms; also the feasibility floor for dwells.
    pub sampling_interval_ms: u64,
    /// Gaussian positional noise, px. Noisy points are clamped to the
    /// screen so the generated stream stays clean by construction.
    pub noise_sigma: f64,
    pub aois: Vec<AoiRect>,
    pub targets: Vec<PlantedTarget>,
}

/// What the generator actually emitted for one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedCluster {
    /// Mean of the emitted member positions.
    pub centroid: Point,
    pub start_ms: u64,
    pub duration_ms: u64,
    pub sample_count: usize,
}

/// Planted truth recorded alongside a generated session.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub clusters: Vec<RealizedCluster>,
    /// Endpoints of each inter-cluster hop.
    pub saccade_hops: Vec<(Point, Point)>,
    /// Per-sample AOI label under the session's AOI map.
    pub sample_aoi: Vec<Option<String>>,
    /// Matches expected from the planted latencies under the default
    /// latency window.
    pub intended_matched: usize,
    pub intended_hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpecError {
    NoClusters,
    /// sampling_interval_ms must be at least 1.
    BadInterval,
    /// jump_velocity must be positive.
    BadJumpVelocity,
    /// Cluster cannot fit `sample_count` samples spaced
    /// `sampling_interval_ms` apart inside `dwell_ms`.
    InfeasibleDwell { cluster: usize },
    /// Cluster disc (radius included) leaves the screen.
    OutOfScreen { cluster: usize },
    /// A cluster needs at least one sample.
    EmptyCluster { cluster: usize },
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::NoClusters => write!(f, "spec has no clusters"),
            SpecError::BadInterval => write!(f, "sampling interval must be >= 1 ms"),
            SpecError::BadJumpVelocity => write!(f, "jump velocity must be positive"),
            SpecError::InfeasibleDwell { cluster } => {
                write!(f, "cluster {cluster}: dwell too short for sample count at this interval")
            }
            SpecError::OutOfScreen { cluster } => {
                write!(f, "cluster {cluster}: disc leaves the screen")
            }
            SpecError::EmptyCluster { cluster } => {
                write!(f, "cluster {cluster}: needs at least one sample")
            }
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.clusters.is_empty() {
            return Err(SpecError::NoClusters);
        }
        if self.sampling_interval_ms == 0 {
            return Err(SpecError::BadInterval);
        }
        if self.jump_velocity <= 0.0 {
            return Err(SpecError::BadJumpVelocity);
        }
        let w = self.screen.width as f64;
        let h = self.screen.height as f64;
        for (i, c) in self.clusters.iter().enumerate() {
            if c.sample_count == 0 {
                return Err(SpecError::EmptyCluster { cluster: i });
            }
            if c.sample_count >= 2
                && c.dwell_ms < self.sampling_interval_ms * (c.sample_count as u64 - 1)
            {
                return Err(SpecError::InfeasibleDwell { cluster: i });
            }
            let r = c.radius.max(0.0);
            let inside = c.center.x - r >= 0.5
                && c.center.x + r <= w - 0.5
                && c.center.y - r >= 0.5
                && c.center.y + r <= h - 0.5;
            if !inside {
                return Err(SpecError::OutOfScreen { cluster: i });
            }
        }
        Ok(())
    }

    /// A small three-cluster demo: recoverable fixations inside bin AOIs
    /// and two targets answered within the latency window.
    pub fn demo() -> SynthSpec {
        SynthSpec {
            seed: 7,
            level: 1,
            screen: ScreenConfig::default(),
            clusters: alloc::vec![
                PlantedCluster {
                    center: Point::new(400.0, 300.0),
                    radius: 8.0,
                    sample_count: 7,
                    dwell_ms: 600,
                },
                PlantedCluster {
                    center: Point::new(1200.0, 400.0),
                    radius: 8.0,
                    sample_count: 7,
                    dwell_ms: 600,
                },
                PlantedCluster {
                    center: Point::new(700.0, 800.0),
                    radius: 8.0,
                    sample_count: 7,
                    dwell_ms: 600,
                },
            ],
            jump_velocity: 2500.0,
            sampling_interval_ms: 50,
            noise_sigma: 0.0,
            aois: alloc::vec![
                AoiRect::new("glass_bin", 320.0, 220.0, 160.0, 160.0),
                AoiRect::new("paper_bin", 1120.0, 320.0, 160.0, 160.0),
                AoiRect::new("organic_bin", 620.0, 720.0, 160.0, 160.0),
            ],
            targets: alloc::vec![
                PlantedTarget {
                    at_ms: 100,
                    click_latency_ms: Some(600),
                },
                PlantedTarget {
                    at_ms: 1200,
                    click_latency_ms: Some(1500),
                },
            ],
        }
    }
}

fn disc_point(rng: &mut SplitMix64, center: Point, radius: f64) -> Point {
    if radius <= 0.0 {
        return center;
    }
    // Rejection sampling in the unit disc; deterministic given the rng.
    loop {
        let x = rng.range(-1.0, 1.0);
        let y = rng.range(-1.0, 1.0);
        if x * x + y * y <= 1.0 {
            return Point::new(center.x + radius * x, center.y + radius * y);
        }
    }
}

fn gaussian(rng: &mut SplitMix64, sigma: f64) -> f64 {
    // Box-Muller.
    let u1 = rng.next_f64().max(1e-12);
    let u2 = rng.next_f64();
    sigma * libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Generates a clean session and its planted ground truth. Deterministic
/// given the spec (including its seed).
pub fn generate_session(spec: &SynthSpec) -> Result<(CleanSession, GroundTruth), SpecError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let w = spec.screen.width as f64;
    let h = spec.screen.height as f64;

    let mut samples: Vec<GazeSample> = Vec::new();
    let mut clusters = Vec::with_capacity(spec.clusters.len());
    let mut hops = Vec::new();

    let mut t = 0u64;
    for c in &spec.clusters {
        // Positions first: the first point decides the hop timing.
        let mut points = Vec::with_capacity(c.sample_count);
        for _ in 0..c.sample_count {
            let mut p = disc_point(&mut rng, c.center, c.radius);
            if spec.noise_sigma > 0.0 {
                p.x += gaussian(&mut rng, spec.noise_sigma);
                p.y += gaussian(&mut rng, spec.noise_sigma);
                p.x = p.x.clamp(0.5, w - 0.5);
                p.y = p.y.clamp(0.5, h - 0.5);
            }
            points.push(p);
        }

        if let Some(last) = samples.last() {
            let from = last.point();
            let to = points[0];
            let dist = from.distance_to(to);
            let mut gap = libm::ceil(dist / spec.jump_velocity * 1000.0) as u64;
            if gap == 0 {
                gap = 1;
            }
            t = last.timestamp_ms + gap;
            hops.push((from, to));
        }

        let start = t;
        let steps = c.sample_count as u64;
        let mut sum = Point::new(0.0, 0.0);
        for (j, p) in points.iter().enumerate() {
            let offset = if steps <= 1 {
                0
            } else {
                // Spread the dwell evenly; the last sample lands exactly
                // on start + dwell.
                (c.dwell_ms * j as u64 + (steps - 1) / 2) / (steps - 1)
            };
            samples.push(GazeSample {
                timestamp_ms: start + offset,
                x: p.x,
                y: p.y,
                level: spec.level,
                event: None,
            });
            sum.x += p.x;
            sum.y += p.y;
        }
        let n = c.sample_count as f64;
        let realized_duration = if steps <= 1 { 0 } else { c.dwell_ms };
        clusters.push(RealizedCluster {
            centroid: Point::new(sum.x / n, sum.y / n),
            start_ms: start,
            duration_ms: realized_duration,
            sample_count: c.sample_count,
        });
        t = start + realized_duration;
    }

    let mut events: Vec<TimelineEvent> = Vec::new();
    for pt in &spec.targets {
        events.push(TimelineEvent {
            timestamp_ms: pt.at_ms,
            kind: EventKind::Target,
            payload: "target".to_string(),
        });
        if let Some(latency) = pt.click_latency_ms {
            events.push(TimelineEvent {
                timestamp_ms: pt.at_ms + latency,
                kind: EventKind::Click,
                payload: "click".to_string(),
            });
        }
    }
    events.sort_by_key(|e| (e.timestamp_ms, e.kind != EventKind::Target));

    let (aoi_map, _) = AoiMap::new(spec.aois.clone(), &spec.screen);
    let sample_aoi: Vec<Option<String>> = samples
        .iter()
        .map(|s| aoi_map.lookup(s.point()).map(String::from))
        .collect();

    let window = MatchConfig::default();
    let intended_matched = spec
        .targets
        .iter()
        .filter(|pt| {
            pt.click_latency_ms
                .map(|l| (window.min_latency_ms..=window.max_latency_ms).contains(&l))
                .unwrap_or(false)
        })
        .count();
    let intended_hit_rate = if spec.targets.is_empty() {
        0.0
    } else {
        intended_matched as f64 / spec.targets.len() as f64 * 100.0
    };

    let session = CleanSession {
        samples,
        events,
        aoi_map,
        screen: spec.screen.clone(),
        dropped_count: 0,
    };
    let truth = GroundTruth {
        clusters,
        saccade_hops: hops,
        sample_aoi,
        intended_matched,
        intended_hit_rate,
    };
    Ok((session, truth))
}

/// Independent basic I-VT oracle: a literal transcription of the velocity
/// formula and threshold comparison, sharing no code with the detector.
/// A zero time step divides to infinity (or NaN for a zero displacement),
/// which the `<=` comparison classifies as a saccade — the same outcome as
/// the detector's sentinel.
pub fn oracle_ivt(samples: &[GazeSample], v_threshold: f64) -> Vec<LabelKind> {
    let mut labels = Vec::new();
    for i in 1..samples.len() {
        let dx = samples[i].x - samples[i - 1].x;
        let dy = samples[i].y - samples[i - 1].y;
        let dt_s = (samples[i].timestamp_ms - samples[i - 1].timestamp_ms) as f64 / 1000.0;
        let velocity = libm::sqrt(dx * dx + dy * dy) / dt_s;
        labels.push(if velocity <= v_threshold {
            LabelKind::Fixation
        } else {
            LabelKind::Saccade
        });
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{classify_ivt, detect_events, DetectionConfig};
    use alloc::vec;

    #[test]
    fn same_seed_same_stream() {
        let spec = SynthSpec::demo();
        let (a, _) = generate_session(&spec).unwrap();
        let (b, _) = generate_session(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seed_different_stream() {
        let mut spec = SynthSpec::demo();
        let (a, _) = generate_session(&spec).unwrap();
        spec.seed = 8;
        let (b, _) = generate_session(&spec).unwrap();
        assert_ne!(a.samples, b.samples);
    }

    #[test]
    fn generated_stream_is_clean_by_construction() {
        let mut spec = SynthSpec::demo();
        spec.noise_sigma = 3.0;
        let (session, _) = generate_session(&spec).unwrap();
        let w = session.screen.width as f64;
        let h = session.screen.height as f64;
        let mut last_t = 0u64;
        for s in &session.samples {
            assert!(s.x >= 0.0 && s.x < w && s.y >= 0.0 && s.y < h);
            assert!(!(s.x == 0.0 && s.y == 0.0));
            assert!(s.timestamp_ms >= last_t);
            last_t = s.timestamp_ms;
        }
    }

    #[test]
    fn detector_recovers_planted_clusters() {
        let spec = SynthSpec::demo();
        let (session, truth) = generate_session(&spec).unwrap();
        let cfg = DetectionConfig::default();
        let (fixations, saccades) = detect_events(&session.samples, &cfg, &session.aoi_map);
        assert_eq!(fixations.len(), 3);
        assert_eq!(saccades.len(), 2);
        for (f, c) in fixations.iter().zip(&truth.clusters) {
            assert!(f.center.distance_to(c.centroid) < 5.0);
            assert_eq!(f.duration_ms, c.duration_ms);
            assert_eq!(f.sample_count, c.sample_count);
        }
    }

    #[test]
    fn short_dwell_clusters_are_not_recovered() {
        let mut spec = SynthSpec::demo();
        for c in &mut spec.clusters {
            c.dwell_ms = 80;
            c.sample_count = 2;
        }
        let (session, _) = generate_session(&spec).unwrap();
        let cfg = DetectionConfig::default();
        let (fixations, _) = detect_events(&session.samples, &cfg, &session.aoi_map);
        assert!(fixations.is_empty());
    }

    #[test]
    fn infeasible_dwell_is_a_spec_error() {
        let mut spec = SynthSpec::demo();
        spec.clusters[1].dwell_ms = 100; // 7 samples at 50 ms need >= 300
        assert_eq!(
            generate_session(&spec).unwrap_err(),
            SpecError::InfeasibleDwell { cluster: 1 }
        );
    }

    #[test]
    fn off_screen_cluster_is_a_spec_error() {
        let mut spec = SynthSpec::demo();
        spec.clusters[0].center = Point::new(5.0, 5.0);
        assert_eq!(
            generate_session(&spec).unwrap_err(),
            SpecError::OutOfScreen { cluster: 0 }
        );
    }

    #[test]
    fn planted_dwell_is_realized_exactly() {
        let spec = SynthSpec::demo();
        let (session, truth) = generate_session(&spec).unwrap();
        assert_eq!(truth.clusters[0].duration_ms, 600);
        let first = session.samples[0].timestamp_ms;
        let last = session.samples[spec.clusters[0].sample_count - 1].timestamp_ms;
        assert_eq!(last - first, 600);
    }

    #[test]
    fn oracle_agrees_with_the_detector_on_random_streams() {
        let mut rng = SplitMix64::new(42);
        let mut samples = Vec::new();
        let mut t = 0u64;
        let mut x = 500.0;
        let mut y = 500.0;
        for _ in 0..500 {
            t += 20 + (rng.next_u64() % 80);
            // displacements straddling the threshold at the 100 ms scale
            x = (x + rng.range(-120.0, 120.0)).clamp(1.0, 1900.0);
            y = (y + rng.range(-120.0, 120.0)).clamp(1.0, 1000.0);
            samples.push(GazeSample {
                timestamp_ms: t,
                x,
                y,
                level: 1,
                event: None,
            });
        }
        let cfg = DetectionConfig::default();
        let ours = classify_ivt(&samples, &cfg);
        let oracle = oracle_ivt(&samples, cfg.v_basic);
        assert_eq!(ours.len(), oracle.len());
        for (label, truth) in ours.iter().zip(&oracle) {
            assert_eq!(label.kind, *truth);
        }
    }

    #[test]
    fn oracle_trivial_streams() {
        let constant: Vec<_> = (0..5)
            .map(|i| GazeSample {
                timestamp_ms: i * 100,
                x: 10.0,
                y: 10.0,
                level: 1,
                event: None,
            })
            .collect();
        assert!(oracle_ivt(&constant, 721.0)
            .iter()
            .all(|k| *k == LabelKind::Fixation));

        let jumps: Vec<_> = (0..5)
            .map(|i| GazeSample {
                timestamp_ms: i * 100,
                x: if i % 2 == 0 { 10.0 } else { 1800.0 },
                y: 10.0,
                level: 1,
                event: None,
            })
            .collect();
        assert!(oracle_ivt(&jumps, 721.0)
            .iter()
            .all(|k| *k == LabelKind::Saccade));
    }

    #[test]
    fn intended_hit_rate_counts_in_window_latencies() {
        let mut spec = SynthSpec::demo();
        spec.targets = vec![
            PlantedTarget { at_ms: 0, click_latency_ms: Some(600) },
            PlantedTarget { at_ms: 2000, click_latency_ms: Some(100) }, // below window
            PlantedTarget { at_ms: 4000, click_latency_ms: None },
            PlantedTarget { at_ms: 6000, click_latency_ms: Some(5000) }, // inclusive max
        ];
        let (_, truth) = generate_session(&spec).unwrap();
        assert_eq!(truth.intended_matched, 2);
        assert_eq!(truth.intended_hit_rate, 50.0);
    }

    #[test]
    fn sample_aoi_labels_follow_the_map() {
        let spec = SynthSpec::demo();
        let (session, truth) = generate_session(&spec).unwrap();
        assert_eq!(truth.sample_aoi.len(), session.samples.len());
        // demo clusters sit inside their bins
        assert_eq!(truth.sample_aoi[0].as_deref(), Some("glass_bin"));
    }
}
