//! Property tests for the detector: oracle equivalence, planted-cluster
//! recovery, and the fixation minima.

use gazemetry_core::detect::{classify_ivt, detect_events, DetectionConfig, LabelKind};
use gazemetry_core::ingest::AoiMap;
use gazemetry_core::synth::{
    generate_session, oracle_ivt, PlantedCluster, SplitMix64, SynthSpec,
};
use gazemetry_core::{GazeSample, Point, ScreenConfig};
use proptest::prelude::*;

fn arbitrary_stream(seed: u64, len: usize) -> Vec<GazeSample> {
    let mut rng = SplitMix64::new(seed);
    let mut t = 0u64;
    let mut samples = Vec::with_capacity(len);
    for _ in 0..len {
        // keep some zero-dt pairs in the mix
        t += rng.next_u64() % 120;
        samples.push(GazeSample {
            timestamp_ms: t,
            x: rng.range(0.0, 1920.0),
            y: rng.range(0.0, 1080.0),
            level: 1,
            event: None,
        });
    }
    samples
}

proptest! {
    #[test]
    fn ivt_matches_the_oracle_exactly(seed in any::<u64>(), len in 2usize..200) {
        let samples = arbitrary_stream(seed, len);
        let cfg = DetectionConfig::default();
        let labels = classify_ivt(&samples, &cfg);
        let oracle = oracle_ivt(&samples, cfg.v_basic);
        prop_assert_eq!(labels.len(), oracle.len());
        for (label, truth) in labels.iter().zip(&oracle) {
            prop_assert_eq!(label.kind, *truth);
        }
    }

    #[test]
    fn every_fixation_satisfies_the_minima(seed in any::<u64>(), len in 2usize..300) {
        let samples = arbitrary_stream(seed, len);
        let cfg = DetectionConfig::default();
        let (fixations, saccades) = detect_events(&samples, &cfg, &AoiMap::default());
        for f in &fixations {
            prop_assert!(f.sample_count >= cfg.min_cluster_size);
            prop_assert!(f.duration_ms >= cfg.min_duration_ms);
            prop_assert_eq!(f.duration_ms, f.end_ms - f.start_ms);
            prop_assert!(f.dispersion >= 0.0);
        }
        for s in &saccades {
            prop_assert!(s.amplitude >= 0.0);
            prop_assert!(s.peak_velocity >= 0.0);
        }
        for pair in fixations.windows(2) {
            prop_assert!(pair[0].end_ms <= pair[1].start_ms);
        }
    }

    #[test]
    fn detection_is_deterministic(seed in any::<u64>()) {
        let samples = arbitrary_stream(seed, 150);
        let cfg = DetectionConfig::default();
        let a = detect_events(&samples, &cfg, &AoiMap::default());
        let b = detect_events(&samples, &cfg, &AoiMap::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn planted_clusters_are_recovered(
        seed in any::<u64>(),
        k in 1usize..8,
        with_runt in proptest::bool::ANY,
    ) {
        // Well-separated grid positions, separation > 2 * spatial threshold.
        let mut clusters = Vec::new();
        let mut expected = 0usize;
        for i in 0..k {
            let cx = 200.0 + 420.0 * (i % 4) as f64;
            let cy = 200.0 + 400.0 * (i / 4) as f64;
            clusters.push(PlantedCluster {
                center: Point::new(cx, cy),
                radius: 10.0,
                sample_count: 5,
                dwell_ms: 400,
            });
            expected += 1;
        }
        if with_runt && k < 4 {
            // a cluster too short to count as a fixation
            clusters.push(PlantedCluster {
                center: Point::new(960.0, 900.0),
                radius: 5.0,
                sample_count: 2,
                dwell_ms: 100,
            });
        }
        let spec = SynthSpec {
            seed,
            level: 1,
            screen: ScreenConfig::default(),
            clusters,
            jump_velocity: 3000.0,
            sampling_interval_ms: 50,
            noise_sigma: 0.0,
            aois: vec![],
            targets: vec![],
        };
        let (session, truth) = generate_session(&spec).unwrap();
        let cfg = DetectionConfig::default();
        let (fixations, _) = detect_events(&session.samples, &cfg, &session.aoi_map);
        prop_assert_eq!(fixations.len(), expected);
        for (f, c) in fixations.iter().zip(truth.clusters.iter().filter(|c| {
            c.sample_count >= cfg.min_cluster_size && c.duration_ms >= cfg.min_duration_ms
        })) {
            prop_assert!(f.center.distance_to(c.centroid) < 5.0);
            prop_assert!(f.duration_ms.abs_diff(c.duration_ms) <= spec.sampling_interval_ms);
        }
    }
}

#[test]
fn boundary_velocities_label_exactly() {
    let cfg = DetectionConfig::default();
    let stream = vec![
        GazeSample { timestamp_ms: 0, x: 0.0, y: 0.0, level: 1, event: None },
        GazeSample { timestamp_ms: 1000, x: 721.0, y: 0.0, level: 1, event: None },
        GazeSample { timestamp_ms: 2000, x: 721.0, y: 722.0, level: 1, event: None },
    ];
    let labels = classify_ivt(&stream, &cfg);
    assert_eq!(labels[0].kind, LabelKind::Fixation);
    assert_eq!(labels[1].kind, LabelKind::Saccade);
    let oracle = oracle_ivt(&stream, cfg.v_basic);
    assert_eq!(labels[0].kind, oracle[0]);
    assert_eq!(labels[1].kind, oracle[1]);
}
