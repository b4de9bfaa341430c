//! Canonical session file format: comma-delimited UTF-8 with a header row.
//!
//! Columns (remappable through `col.*` config keys, matched
//! case-insensitively): `timestamp_ms`, `level`, `gaze` — text `"(x, y)"`
//! — or the pair `gaze_x`/`gaze_y`, `event` (free text, empty allowed),
//! and optionally `aoi_name`,`aoi_x`,`aoi_y`,`aoi_w`,`aoi_h` for inline
//! AOI definitions. A row may define an AOI, carry a gaze sample, carry an
//! event, or any combination; a row with an event but no gaze text is an
//! event-only row and never counts as a dropped sample.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use gazemetry_core::ingest::{parse_point, AoiRect, EventKind, IngestError, Point, TimelineEvent};
use gazemetry_core::CleanSession;

use crate::config::ColumnMap;
use crate::error::CliError;

/// One data row in source units, before coordinate repair.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub row: usize,
    pub timestamp_ms: u64,
    pub level: u32,
    /// Gaze position in source units; `None` when the gaze fields were
    /// empty (a missing-coordinate sample unless `event_only`).
    pub point: Option<Point>,
    pub event: Option<String>,
    /// True when the row carried an event and no gaze text at all.
    pub event_only: bool,
}

/// A parsed session log: rows in file order plus inline AOI definitions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionLog {
    pub rows: Vec<LogRow>,
    pub inline_aois: Vec<AoiRect>,
}

struct Columns {
    timestamp: usize,
    level: usize,
    gaze: Option<usize>,
    gaze_x: Option<usize>,
    gaze_y: Option<usize>,
    event: Option<usize>,
    aoi: Option<[usize; 5]>,
}

fn find(headers: &[String], name: &str) -> Option<usize> {
    headers.iter().position(|h| h.eq_ignore_ascii_case(name))
}

fn resolve_columns(headers: &[String], map: &ColumnMap, path: &Path) -> Result<Columns, CliError> {
    let missing = |what: &str| CliError::Parse {
        path: path.to_path_buf(),
        row: None,
        message: format!("missing required column {what:?}"),
    };
    let timestamp = find(headers, &map.timestamp).ok_or_else(|| missing(&map.timestamp))?;
    let level = find(headers, &map.level).ok_or_else(|| missing(&map.level))?;
    let gaze = find(headers, &map.gaze);
    let gaze_x = find(headers, &map.gaze_x);
    let gaze_y = find(headers, &map.gaze_y);
    if gaze.is_none() && (gaze_x.is_none() || gaze_y.is_none()) {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            row: None,
            message: format!(
                "need a {:?} column or both {:?} and {:?}",
                map.gaze, map.gaze_x, map.gaze_y
            ),
        });
    }
    let aoi = match (
        find(headers, &map.aoi_name),
        find(headers, &map.aoi_x),
        find(headers, &map.aoi_y),
        find(headers, &map.aoi_w),
        find(headers, &map.aoi_h),
    ) {
        (Some(n), Some(x), Some(y), Some(w), Some(h)) => Some([n, x, y, w, h]),
        (None, ..) => None,
        _ => {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                row: None,
                message: "inline AOI columns must all be present (aoi_name..aoi_h)".into(),
            })
        }
    };
    Ok(Columns {
        timestamp,
        level,
        gaze,
        gaze_x,
        gaze_y,
        event: find(headers, &map.event),
        aoi,
    })
}

fn field(record: &csv::StringRecord, idx: usize) -> &str {
    record.get(idx).unwrap_or("").trim()
}

/// Reads a canonical session file.
pub fn read_session(path: &Path, map: &ColumnMap) -> Result<SessionLog, CliError> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        row: None,
        message: e.to_string(),
    })?;
    read_session_from(BufReader::new(file), map, path)
}

/// Reads the canonical format from any reader; `path` is for diagnostics.
pub fn read_session_from<R: Read>(
    reader: R,
    map: &ColumnMap,
    path: &Path,
) -> Result<SessionLog, CliError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = csv_reader
        .headers()
        .map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            row: None,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let cols = resolve_columns(&headers, map, path)?;

    let parse_err = |row: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        row: Some(row),
        message,
    };

    let mut log = SessionLog::default();
    let mut last_t_per_level: Vec<(u32, u64)> = Vec::new();
    for (i, result) in csv_reader.records().enumerate() {
        let row_number = i + 1; // 1-based data row
        let record = result.map_err(|e| parse_err(row_number, e.to_string()))?;

        if let Some([n, x, y, w, h]) = cols.aoi {
            let name = field(&record, n);
            if !name.is_empty() {
                let parse_f = |idx: usize, what: &str| -> Result<f64, CliError> {
                    field(&record, idx)
                        .parse::<f64>()
                        .map_err(|_| parse_err(row_number, format!("bad AOI {what}")))
                };
                log.inline_aois.push(AoiRect::new(
                    name,
                    parse_f(x, "x")?,
                    parse_f(y, "y")?,
                    parse_f(w, "w")?,
                    parse_f(h, "h")?,
                ));
                // An AOI-only row needs no timestamp or gaze.
                let rest_empty = field(&record, cols.timestamp).is_empty();
                if rest_empty {
                    continue;
                }
            }
        }

        let gaze_text_empty = match (cols.gaze, cols.gaze_x, cols.gaze_y) {
            (Some(g), _, _) if !field(&record, g).is_empty() => false,
            (_, Some(gx), Some(gy))
                if !field(&record, gx).is_empty() || !field(&record, gy).is_empty() =>
            {
                false
            }
            _ => true,
        };
        let event_text = cols
            .event
            .map(|e| field(&record, e).to_string())
            .filter(|e| !e.is_empty());

        // Rows with nothing in them are skipped outright.
        if gaze_text_empty && event_text.is_none() && field(&record, cols.timestamp).is_empty() {
            continue;
        }

        let t_text = field(&record, cols.timestamp);
        if t_text.is_empty() {
            return Err(parse_err(row_number, "missing timestamp".into()));
        }
        let timestamp_ms: u64 = t_text
            .parse()
            .map_err(|_| parse_err(row_number, format!("bad timestamp {t_text:?}")))?;
        let level_text = field(&record, cols.level);
        let level: u32 = if level_text.is_empty() {
            1
        } else {
            level_text
                .parse()
                .map_err(|_| parse_err(row_number, format!("bad level {level_text:?}")))?
        };

        let point = if gaze_text_empty {
            None
        } else {
            let parsed = match cols.gaze {
                Some(g) if !field(&record, g).is_empty() => parse_point(field(&record, g)),
                _ => {
                    let (gx, gy) = (cols.gaze_x.unwrap(), cols.gaze_y.unwrap());
                    let xs = field(&record, gx);
                    let ys = field(&record, gy);
                    if xs.is_empty() || ys.is_empty() {
                        Err(IngestError::MissingCoordinate)
                    } else {
                        match (xs.parse::<f64>(), ys.parse::<f64>()) {
                            (Ok(x), Ok(y)) => Ok(Point::new(x, y)),
                            _ => Err(IngestError::MalformedPoint(format!("{xs},{ys}"))),
                        }
                    }
                }
            };
            match parsed {
                Ok(p) => Some(p),
                Err(IngestError::MissingCoordinate) => None,
                Err(e) => return Err(parse_err(row_number, e.to_string())),
            }
        };

        // Gaze samples must be time-ordered within their level.
        if point.is_some() {
            match last_t_per_level.iter_mut().find(|(l, _)| *l == level) {
                Some((_, last)) => {
                    if timestamp_ms < *last {
                        return Err(parse_err(
                            row_number,
                            format!("timestamp {timestamp_ms} goes backwards in level {level}"),
                        ));
                    }
                    *last = timestamp_ms;
                }
                None => last_t_per_level.push((level, timestamp_ms)),
            }
        }

        let event_only = point.is_none() && gaze_text_empty && event_text.is_some();
        log.rows.push(LogRow {
            row: row_number,
            timestamp_ms,
            level,
            point,
            event: event_text,
            event_only,
        });
    }
    Ok(log)
}

/// Distinct levels in ascending order.
pub fn levels_of(log: &SessionLog) -> Vec<u32> {
    let mut levels: Vec<u32> = log.rows.iter().map(|r| r.level).collect();
    levels.sort_unstable();
    levels.dedup();
    levels
}

/// Writes a clean session (typically synthetic) in the canonical format:
/// AOI definition rows first, then samples and events merged in time
/// order. Gaze text uses shortest round-trip float formatting, so reading
/// the file back reproduces the exact sample positions.
pub fn write_session<W: Write>(
    mut out: W,
    session: &CleanSession,
    nominal_aois: &[AoiRect],
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record([
        "timestamp_ms",
        "level",
        "gaze",
        "event",
        "aoi_name",
        "aoi_x",
        "aoi_y",
        "aoi_w",
        "aoi_h",
    ])?;
    for a in nominal_aois {
        w.write_record([
            "",
            "",
            "",
            "",
            a.name.as_str(),
            &format!("{}", a.x),
            &format!("{}", a.y),
            &format!("{}", a.w),
            &format!("{}", a.h),
        ])?;
    }

    enum Row<'a> {
        Sample(&'a gazemetry_core::GazeSample),
        Event(&'a TimelineEvent),
    }
    let mut rows: Vec<(u64, u8, Row)> = session
        .samples
        .iter()
        .map(|s| (s.timestamp_ms, 0u8, Row::Sample(s)))
        .chain(
            session
                .events
                .iter()
                .map(|e| (e.timestamp_ms, 1u8, Row::Event(e))),
        )
        .collect();
    rows.sort_by_key(|(t, kind, _)| (*t, *kind));

    let level = session.samples.first().map(|s| s.level).unwrap_or(1);
    for (_, _, row) in rows {
        match row {
            Row::Sample(s) => {
                w.write_record([
                    &s.timestamp_ms.to_string(),
                    &s.level.to_string(),
                    &format!("({}, {})", s.x, s.y),
                    s.event.as_deref().unwrap_or(""),
                    "",
                    "",
                    "",
                    "",
                    "",
                ])?;
            }
            Row::Event(e) => {
                w.write_record([
                    &e.timestamp_ms.to_string(),
                    &level.to_string(),
                    "",
                    &e.payload,
                    "",
                    "",
                    "",
                    "",
                    "",
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Builds the per-row timeline events from parsed rows (every non-empty
/// event tag, whether or not the row's gaze survives filtering).
pub fn timeline_events(rows: &[LogRow]) -> Vec<TimelineEvent> {
    rows.iter()
        .filter_map(|r| {
            r.event.as_ref().map(|payload| TimelineEvent {
                timestamp_ms: r.timestamp_ms,
                kind: EventKind::classify(payload),
                payload: payload.clone(),
            })
        })
        .collect()
}

/// Source-unit x/y iterators for coordinate-mode detection.
pub fn coordinate_columns(rows: &[LogRow]) -> (Vec<f64>, Vec<f64>) {
    let xs = rows.iter().filter_map(|r| r.point.map(|p| p.x)).collect();
    let ys = rows.iter().filter_map(|r| r.point.map(|p| p.y)).collect();
    (xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn parse(text: &str) -> Result<SessionLog, CliError> {
        read_session_from(text.as_bytes(), &ColumnMap::default(), &PathBuf::from("test.csv"))
    }

    #[test]
    fn reads_gaze_text_and_split_columns() {
        let log = parse(
            "timestamp_ms,level,gaze,event\n\
             0,1,\"(0.5, 0.5)\",\n\
             10,1,\"(0.6, 0.4)\",target\n",
        )
        .unwrap();
        assert_eq!(log.rows.len(), 2);
        assert_eq!(log.rows[0].point, Some(Point::new(0.5, 0.5)));
        assert_eq!(log.rows[1].event.as_deref(), Some("target"));

        let log = parse(
            "timestamp_ms,level,gaze_x,gaze_y,event\n\
             0,1,512,733,\n",
        )
        .unwrap();
        assert_eq!(log.rows[0].point, Some(Point::new(512.0, 733.0)));
    }

    #[test]
    fn event_only_rows_are_flagged() {
        let log = parse(
            "timestamp_ms,level,gaze,event\n\
             0,1,\"(100, 100)\",\n\
             5,1,,click\n",
        )
        .unwrap();
        assert_eq!(log.rows.len(), 2);
        assert!(log.rows[1].event_only);
        assert_eq!(log.rows[1].point, None);
    }

    #[test]
    fn inline_aoi_rows_define_aois() {
        let log = parse(
            "timestamp_ms,level,gaze,event,aoi_name,aoi_x,aoi_y,aoi_w,aoi_h\n\
             ,,,,glass_bin,100,100,200,200\n\
             0,1,\"(150, 150)\",,,,,,\n",
        )
        .unwrap();
        assert_eq!(log.inline_aois.len(), 1);
        assert_eq!(log.inline_aois[0].name, "glass_bin");
        assert_eq!(log.rows.len(), 1);
    }

    #[test]
    fn malformed_gaze_is_a_parse_error_with_row() {
        let err = parse(
            "timestamp_ms,level,gaze,event\n\
             0,1,abc,\n",
        )
        .unwrap_err();
        match err {
            CliError::Parse { row, .. } => assert_eq!(row, Some(1)),
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn backwards_timestamps_are_rejected() {
        let err = parse(
            "timestamp_ms,level,gaze,event\n\
             100,1,\"(1, 1)\",\n\
             50,1,\"(2, 2)\",\n",
        )
        .unwrap_err();
        match err {
            CliError::Parse { row, message, .. } => {
                assert_eq!(row, Some(2));
                assert!(message.contains("backwards"));
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn interleaved_levels_keep_their_own_clocks() {
        let log = parse(
            "timestamp_ms,level,gaze,event\n\
             0,1,\"(1, 1)\",\n\
             0,2,\"(1, 1)\",\n\
             10,1,\"(2, 2)\",\n\
             5,2,\"(2, 2)\",\n",
        )
        .unwrap();
        assert_eq!(levels_of(&log), vec![1, 2]);
    }

    #[test]
    fn missing_required_columns_fail() {
        assert!(parse("timestamp_ms,gaze\n0,(1,1)\n").is_err());
        assert!(parse("level,gaze\n1,(1,1)\n").is_err());
        assert!(parse("timestamp_ms,level\n0,1\n").is_err());
    }

    #[test]
    fn headers_match_case_insensitively() {
        let log = parse(
            "Timestamp_MS,Level,Gaze,Event\n\
             0,1,\"(1, 1)\",\n",
        )
        .unwrap();
        assert_eq!(log.rows.len(), 1);
    }
}
