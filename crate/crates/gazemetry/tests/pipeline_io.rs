//! Integration tests for file IO and pipeline orchestration.

use std::fs;
use std::path::PathBuf;

use gazemetry::analyze::{analyze_log, cmd_analyze, AnalyzeRequest};
use gazemetry::config::{ColumnMap, EffectiveConfig};
use gazemetry::error::CliError;
use gazemetry::report_io::{emit_reports, parse_report, Formats};
use gazemetry::session_file::read_session_from;
use gazemetry::synth_cmd::{cmd_synth, SynthRequest};
use gazemetry_core::report::render_json;

fn parse_log(text: &str) -> gazemetry::session_file::SessionLog {
    read_session_from(text.as_bytes(), &ColumnMap::default(), &PathBuf::from("t.csv")).unwrap()
}

fn three_level_log() -> String {
    let mut csv = String::from("timestamp_ms,level,gaze,event,aoi_name,aoi_x,aoi_y,aoi_w,aoi_h\n");
    csv.push_str(",,,,glass_bin,300,200,200,200\n");
    csv.push_str(",,,,paper_bin,1100,300,200,200\n");
    for level in 1..=3u32 {
        let base = (level as u64 - 1) * 100_000;
        csv.push_str(&format!("{},{level},,target,,,,,\n", base + 50));
        // a fixation inside glass_bin
        for i in 0..5 {
            csv.push_str(&format!(
                "{},{level},\"(400, {})\",,,,,,\n",
                base + 100 + i * 100,
                300 + i
            ));
        }
        csv.push_str(&format!("{},{level},,Picked Trash,,,,,\n", base + 700));
        // jump to paper_bin and fixate
        for i in 0..5 {
            csv.push_str(&format!(
                "{},{level},\"({}, 400)\",,,,,,\n",
                base + 800 + i * 100,
                1200 + i
            ));
        }
        // invalid rows: origin and out of bounds
        csv.push_str(&format!("{},{level},\"(0, 0)\",,,,,,\n", base + 1400));
        csv.push_str(&format!("{},{level},\"(5000, 400)\",,,,,,\n", base + 1500));
    }
    csv
}

#[test]
fn multi_level_analysis_produces_a_section_per_level() {
    let log = parse_log(&three_level_log());
    let cfg = EffectiveConfig::default();
    let outcome = analyze_log(&log, &cfg, None, "s1", &PathBuf::from("t.csv")).unwrap();
    assert_eq!(outcome.report.levels.len(), 3);
    for level in &outcome.report.levels {
        assert_eq!(level.metrics.fixation_count, 2);
        assert_eq!(level.metrics.saccade_count, 1);
        assert_eq!(level.dropped_count, 2);
        assert_eq!(level.metrics.hit_rate, 100.0);
        assert_eq!(level.metrics.target_count, 1);
        // samples sit inside bins the whole time
        assert_eq!(level.metrics.task_relevance, Some(1.0));
        assert_eq!(level.metrics.aoi_transitions, 1);
    }
}

#[test]
fn json_report_round_trips_through_the_independent_parser() {
    let log = parse_log(&three_level_log());
    let cfg = EffectiveConfig::default();
    let outcome = analyze_log(&log, &cfg, None, "s1", &PathBuf::from("t.csv")).unwrap();
    let json = render_json(&outcome.report);
    let parsed = parse_report(&json).unwrap();
    assert_eq!(parsed, outcome.report);
    // and re-rendering the parsed value is byte-identical
    assert_eq!(render_json(&parsed), json);
}

#[test]
fn picked_trash_rows_feed_hit_rate_but_not_gaze() {
    let csv = "timestamp_ms,level,gaze,event\n\
               100,1,,target\n\
               200,1,\"(400, 300)\",\n\
               300,1,\"(401, 300)\",\n\
               400,1,\"(402, 300)\",\n\
               700,1,\"(403, 300)\",Picked Trash\n";
    let log = parse_log(csv);
    let cfg = EffectiveConfig::default();
    let outcome = analyze_log(&log, &cfg, None, "s", &PathBuf::from("t.csv")).unwrap();
    let m = &outcome.report.levels[0].metrics;
    // the click row's gaze is dropped, its event still matches the target
    assert_eq!(m.sample_count, 3);
    assert_eq!(outcome.report.levels[0].dropped_count, 1);
    assert_eq!(m.matched, 1);
    assert_eq!(m.hit_rate, 100.0);
}

#[test]
fn bottom_origin_normalized_logs_are_repaired() {
    let csv = "timestamp_ms,level,gaze,event\n\
               0,1,\"(0.5, 0.25)\",\n\
               100,1,\"(0.5, 0.25)\",\n\
               200,1,\"(0.5, 0.25)\",\n";
    let log = parse_log(csv);
    let mut cfg = EffectiveConfig::default();
    cfg.set("screen.y_origin", "bottom").unwrap();
    let outcome = analyze_log(&log, &cfg, None, "s", &PathBuf::from("t.csv")).unwrap();
    let fx = &outcome.report.levels[0].fixations[0];
    assert_eq!((fx.center.x, fx.center.y), (960.0, 810.0));
}

#[test]
fn all_invalid_levels_fail_softly_and_whole_files_fail_hard() {
    // level 1 valid, level 2 all (0,0)
    let csv = "timestamp_ms,level,gaze,event\n\
               0,1,\"(400, 300)\",\n\
               100,1,\"(401, 300)\",\n\
               200,1,\"(402, 300)\",\n\
               0,2,\"(0, 0)\",\n\
               100,2,\"(0, 0)\",\n";
    let log = parse_log(csv);
    let cfg = EffectiveConfig::default();
    let outcome = analyze_log(&log, &cfg, None, "s", &PathBuf::from("t.csv")).unwrap();
    assert_eq!(outcome.report.levels.len(), 1);
    assert_eq!(outcome.report.failed_levels.len(), 1);
    assert_eq!(outcome.report.failed_levels[0].level, 2);

    // every level unusable -> hard error
    let csv = "timestamp_ms,level,gaze,event\n0,1,\"(0, 0)\",\n";
    let log = parse_log(csv);
    match analyze_log(&log, &cfg, None, "s", &PathBuf::from("t.csv")) {
        Err(CliError::EmptySession(_)) => {}
        other => panic!("expected EmptySession, got {other:?}"),
    }
}

#[test]
fn config_override_shows_up_in_the_echo() {
    let log = parse_log(&three_level_log());
    let mut cfg = EffectiveConfig::default();
    cfg.set("detect.v_basic", "500").unwrap();
    let outcome = analyze_log(&log, &cfg, None, "s", &PathBuf::from("t.csv")).unwrap();
    let echoed = outcome
        .report
        .config_echo
        .iter()
        .find(|(k, _)| k == "detect.v_basic")
        .unwrap();
    assert_eq!(echoed.1, "500");
}

#[test]
fn emitted_files_match_the_advertised_layout() {
    let dir = tempfile::tempdir().unwrap();
    let log = parse_log(&three_level_log());
    let cfg = EffectiveConfig::default();
    let outcome = analyze_log(&log, &cfg, None, "s1", &PathBuf::from("t.csv")).unwrap();
    let files = emit_reports(&outcome.report, Formats::default(), dir.path()).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.strip_prefix(dir.path()).unwrap().to_string_lossy().into_owned())
        .collect();
    assert!(names.contains(&"report.json".to_string()));
    assert!(names.contains(&"report.md".to_string()));
    for level in 1..=3 {
        for series in ["fixations", "saccades", "scanpath", "timeline", "hist"] {
            let expect = format!("plots/{series}_L{level}.csv");
            assert!(names.contains(&expect), "{expect}");
        }
    }
    // fixation plot rows match the event count
    let fix_csv = fs::read_to_string(dir.path().join("plots/fixations_L1.csv")).unwrap();
    assert_eq!(fix_csv.lines().count() - 1, outcome.report.levels[0].fixations.len());
}

#[test]
fn batch_mode_writes_per_student_reports_and_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sessions");
    fs::create_dir(&input).unwrap();
    fs::write(input.join("alice.csv"), three_level_log()).unwrap();
    fs::write(input.join("bob.csv"), three_level_log()).unwrap();
    // corrupt entry fails without sinking the batch
    fs::write(input.join("carol.csv"), "timestamp_ms,level,gaze\n0,1,\"(0,0)\"\n").unwrap();
    let out = dir.path().join("out");
    let req = AnalyzeRequest {
        input,
        out_dir: Some(out.clone()),
        ..Default::default()
    };
    let summary = cmd_analyze(&req, &EffectiveConfig::default()).unwrap();
    assert_eq!(summary.students.len(), 3);
    assert!(summary.students[0].1.is_ok());
    assert!(summary.students[1].1.is_ok());
    assert!(summary.students[2].1.is_err());
    assert!(out.join("alice/report.json").exists());
    assert!(out.join("bob/report.md").exists());
    let index = fs::read_to_string(out.join("index.csv")).unwrap();
    assert!(index.contains("alice,ok"));
    assert!(index.contains("carol,error"));
}

#[test]
fn synth_dump_survives_the_full_parser() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("synth.csv");
    let outcome = cmd_synth(&SynthRequest {
        spec_path: None,
        out_path: out_path.clone(),
        truth_path: None,
    })
    .unwrap();
    assert!(out_path.exists());
    assert!(dir.path().join("synth.truth.txt").exists());

    let text = fs::read_to_string(&out_path).unwrap();
    let log = parse_log(&text);
    // positions round-trip exactly through the text format
    let parsed_points: Vec<_> = log.rows.iter().filter_map(|r| r.point).collect();
    let original: Vec<_> = outcome.session.samples.iter().map(|s| s.point()).collect();
    assert_eq!(parsed_points, original);
    assert_eq!(log.inline_aois.len(), outcome.spec.aois.len());
}

#[test]
fn dump_labels_flag_writes_per_sample_traces() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("s.csv");
    fs::write(&session, three_level_log()).unwrap();
    let out = dir.path().join("out");
    let req = AnalyzeRequest {
        input: session,
        out_dir: Some(out.clone()),
        dump_labels: true,
        ..Default::default()
    };
    let summary = cmd_analyze(&req, &EffectiveConfig::default()).unwrap();
    let outcome = summary.students[0].1.as_ref().unwrap();
    let labels = fs::read_to_string(out.join("labels_L1.csv")).unwrap();
    // one row per sample plus header
    assert_eq!(
        labels.lines().count() - 1,
        outcome.report.levels[0].metrics.sample_count
    );
    assert!(labels.starts_with("index,timestamp_ms,velocity,basic_label,cluster_id\n"));
}
