//! Session cleaning and the AOI spatial framework.
//!
//! Raw logs arrive as per-row gaze coordinates in whatever convention the
//! recorder used (normalized or pixel, top- or bottom-origin). This module
//! repairs the coordinate system, drops invalid samples, and builds the
//! point -> AOI-name lookup that every downstream metric shares.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A 2D position. Units depend on context: source units before
/// [`to_screen`], screen pixels (top-left origin) after.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance_to(&self, other: Point) -> f64 {
        crate::math::hypot(other.x - self.x, other.y - self.y)
    }
}

/// One cleaned gaze sample: screen-pixel position at a session-relative time.
#[derive(Debug, Clone, PartialEq)]
pub struct GazeSample {
    /// Milliseconds since session start.
    pub timestamp_ms: u64,
    /// Horizontal screen pixels, 0 at the left edge.
    pub x: f64,
    /// Vertical screen pixels, 0 at the top edge.
    pub y: f64,
    /// Game level the sample belongs to.
    pub level: u32,
    /// Raw event tag carried on the same log row, if any.
    pub event: Option<String>,
}

impl GazeSample {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Vertical origin of the source log's coordinate system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YOrigin {
    /// y = 0 at the top of the screen (already the screen convention).
    #[default]
    Top,
    /// y = 0 at the bottom; Y is inverted during [`to_screen`].
    Bottom,
}

/// Screen geometry and AOI sizing rules.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenConfig {
    pub width: u32,
    pub height: u32,
    /// Pixels of slack added on every side of an AOI at lookup time.
    pub aoi_tolerance: f64,
    /// Minimum AOI width/height after normalization.
    pub min_aoi_size: f64,
    pub y_origin: YOrigin,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        ScreenConfig {
            width: 1920,
            height: 1080,
            aoi_tolerance: 50.0,
            min_aoi_size: 80.0,
            y_origin: YOrigin::Top,
        }
    }
}

impl ScreenConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.width == 0 || self.height == 0 {
            return Err(IngestError::InvalidScreen);
        }
        if self.aoi_tolerance < 0.0 || self.min_aoi_size < 1.0 {
            return Err(IngestError::InvalidScreen);
        }
        Ok(())
    }
}

/// Whether an AOI counts as a task-relevant bin for `task_relevance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AoiRole {
    #[default]
    Bin,
    Other,
}

/// A named screen rectangle, `(x, y)` at the top-left corner.
#[derive(Debug, Clone, PartialEq)]
pub struct AoiRect {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub role: AoiRole,
}

impl AoiRect {
    pub fn new(name: &str, x: f64, y: f64, w: f64, h: f64) -> Self {
        AoiRect {
            name: name.to_string(),
            x,
            y,
            w,
            h,
            role: AoiRole::Bin,
        }
    }

    /// Containment against this rectangle inflated by `tolerance` on every
    /// side. All four inflated edges are inclusive, so a point exactly
    /// `tolerance` pixels outside the rectangle still maps to it.
    pub fn contains_with_tolerance(&self, p: Point, tolerance: f64) -> bool {
        p.x >= self.x - tolerance
            && p.x <= self.x + self.w + tolerance
            && p.y >= self.y - tolerance
            && p.y <= self.y + self.h + tolerance
    }
}

/// The point -> AOI-name mapping. Lookup is total: every screen point
/// resolves to the first matching AOI in declaration order, or to none.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AoiMap {
    pub aois: Vec<AoiRect>,
    pub tolerance: f64,
}

impl AoiMap {
    /// Builds a map from nominal rectangles, normalizing each one to the
    /// minimum size and clamping it into the screen. Returns one warning
    /// line per AOI that had to be shrunk to fit the screen.
    pub fn new(aois: Vec<AoiRect>, screen: &ScreenConfig) -> (Self, Vec<String>) {
        let mut warnings = Vec::new();
        let normalized = aois
            .into_iter()
            .map(|a| {
                let oversized =
                    a.w.max(screen.min_aoi_size) > screen.width as f64
                        || a.h.max(screen.min_aoi_size) > screen.height as f64;
                if oversized {
                    warnings.push(alloc::format!(
                        "AOI '{}' exceeds the {}x{} screen; clamped",
                        a.name, screen.width, screen.height
                    ));
                }
                normalize_aoi(a, screen)
            })
            .collect();
        (
            AoiMap {
                aois: normalized,
                tolerance: screen.aoi_tolerance,
            },
            warnings,
        )
    }

    /// First-match-wins lookup over tolerance-inflated rectangles.
    pub fn lookup(&self, p: Point) -> Option<&str> {
        self.aois
            .iter()
            .find(|a| a.contains_with_tolerance(p, self.tolerance))
            .map(|a| a.name.as_str())
    }
}

/// Classified meaning of a raw event tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// A sorting target appeared.
    Target,
    /// The player clicked / picked an item.
    Click,
    Other,
}

impl EventKind {
    /// Maps raw log text onto the canonical event vocabulary. The game logs
    /// clicks as "Picked Trash"; synthetic data uses the bare tags.
    pub fn classify(raw: &str) -> EventKind {
        let t = raw.trim();
        if t.is_empty() {
            return EventKind::Other;
        }
        let lower = to_ascii_lowercase(t);
        if lower == "click" || lower.contains("picked trash") {
            EventKind::Click
        } else if lower == "target" || lower.starts_with("target") {
            EventKind::Target
        } else {
            EventKind::Other
        }
    }
}

fn to_ascii_lowercase(s: &str) -> String {
    s.chars().map(|c| c.to_ascii_lowercase()).collect()
}

/// A game event on the session timeline. Events survive gaze filtering even
/// when the log row that carried them is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEvent {
    pub timestamp_ms: u64,
    pub kind: EventKind,
    pub payload: String,
}

/// One parsed log row before validation. `point` is already in screen
/// pixels; `None` means the row had no usable coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSample {
    pub timestamp_ms: u64,
    pub point: Option<Point>,
    pub level: u32,
    pub event: Option<String>,
}

/// A per-level stream of parsed rows plus the shared spatial framework.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSession {
    pub samples: Vec<RawSample>,
    pub events: Vec<TimelineEvent>,
    pub aoi_map: AoiMap,
    pub screen: ScreenConfig,
}

/// The validated output of [`filter_samples`]: every sample is in bounds,
/// not (0,0), and time-ordered; the event timeline is untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanSession {
    pub samples: Vec<GazeSample>,
    pub events: Vec<TimelineEvent>,
    pub aoi_map: AoiMap,
    pub screen: ScreenConfig,
    pub dropped_count: usize,
}

/// How raw coordinates relate to screen pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordMode {
    /// Per point: both components in [0, 1] means normalized.
    #[default]
    Auto,
    /// Coordinates are fractions of the screen size.
    Normalized,
    /// Coordinates are already pixels.
    Pixel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IngestError {
    /// Coordinate text that does not parse as a pair of numbers.
    MalformedPoint(String),
    /// A required coordinate field was empty.
    MissingCoordinate,
    /// No samples survived filtering; the recording is unusable.
    EmptySession,
    /// Screen configuration violates its invariants.
    InvalidScreen,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::MalformedPoint(raw) => write!(f, "malformed coordinate text: {raw:?}"),
            IngestError::MissingCoordinate => write!(f, "missing coordinate field"),
            IngestError::EmptySession => write!(f, "no valid gaze samples in session"),
            IngestError::InvalidScreen => write!(f, "invalid screen configuration"),
        }
    }
}

/// Parses coordinate text into a point in source units.
///
/// Accepted forms: two numbers separated by a comma, with optional
/// whitespace and an optional single pair of surrounding parentheses —
/// `"(0.512, 0.733)"`, `"512,733"`, `" 0.5 , 0.5 "`.
pub fn parse_point(raw: &str) -> Result<Point, IngestError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(IngestError::MissingCoordinate);
    }
    let inner = match (trimmed.strip_prefix('('), trimmed.strip_suffix(')')) {
        (Some(_), Some(_)) => &trimmed[1..trimmed.len() - 1],
        (None, None) => trimmed,
        _ => return Err(IngestError::MalformedPoint(trimmed.to_string())),
    };
    let mut parts = inner.split(',');
    let (Some(xs), Some(ys), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(IngestError::MalformedPoint(trimmed.to_string()));
    };
    let x = parse_component(xs, trimmed)?;
    let y = parse_component(ys, trimmed)?;
    Ok(Point::new(x, y))
}

fn parse_component(text: &str, whole: &str) -> Result<f64, IngestError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(IngestError::MissingCoordinate);
    }
    t.parse::<f64>()
        .map_err(|_| IngestError::MalformedPoint(whole.to_string()))
}

/// Transforms a source-unit point into screen pixels with a top-left origin.
///
/// Normalized components scale by the screen size; `YOrigin::Bottom` flips
/// the vertical axis (`height - y` for pixels, `(1 - y) * height` for
/// normalized input). The result may still be out of bounds — that is
/// [`filter_samples`]' job.
pub fn to_screen(p: Point, screen: &ScreenConfig, mode: CoordMode) -> Point {
    let normalized = match mode {
        CoordMode::Normalized => true,
        CoordMode::Pixel => false,
        CoordMode::Auto => (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y),
    };
    to_screen_cols(p, screen, normalized, normalized)
}

/// [`to_screen`] with the normalized/pixel decision made per column, as the
/// file-level detection rule produces it.
pub fn to_screen_cols(
    p: Point,
    screen: &ScreenConfig,
    x_normalized: bool,
    y_normalized: bool,
) -> Point {
    let w = screen.width as f64;
    let h = screen.height as f64;
    let x = if x_normalized { p.x * w } else { p.x };
    let y = match (y_normalized, screen.y_origin) {
        (true, YOrigin::Top) => p.y * h,
        (true, YOrigin::Bottom) => (1.0 - p.y) * h,
        (false, YOrigin::Top) => p.y,
        (false, YOrigin::Bottom) => h - p.y,
    };
    Point::new(x, y)
}

/// File-level coordinate-mode detection: a column is treated as normalized
/// iff at least 99% of its non-missing values lie in [0, 1].
pub fn detect_coord_mode(values: impl Iterator<Item = f64>) -> CoordMode {
    let mut total = 0usize;
    let mut in_unit = 0usize;
    for v in values {
        total += 1;
        if (0.0..=1.0).contains(&v) {
            in_unit += 1;
        }
    }
    if total == 0 {
        return CoordMode::Pixel;
    }
    if (in_unit as f64) >= 0.99 * (total as f64) {
        CoordMode::Normalized
    } else {
        CoordMode::Pixel
    }
}

/// Drops invalid rows from the gaze stream and produces a [`CleanSession`].
///
/// Removed: rows without coordinates, exact (0,0) tracker failures,
/// out-of-bounds positions, and click rows ("Picked Trash"), whose gaze
/// coordinate is a UI artifact. Every removal increments `dropped_count`;
/// the event timeline is carried over unchanged, so no game event is lost.
pub fn filter_samples(session: RawSession) -> Result<CleanSession, IngestError> {
    let RawSession {
        samples,
        events,
        aoi_map,
        screen,
    } = session;
    let w = screen.width as f64;
    let h = screen.height as f64;
    let mut kept = Vec::with_capacity(samples.len());
    let mut dropped = 0usize;
    for s in samples {
        let Some(p) = s.point else {
            dropped += 1;
            continue;
        };
        let is_click = s
            .event
            .as_deref()
            .map(|e| EventKind::classify(e) == EventKind::Click)
            .unwrap_or(false);
        let out_of_bounds = !(p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h);
        if is_click || out_of_bounds || (p.x == 0.0 && p.y == 0.0) {
            dropped += 1;
            continue;
        }
        kept.push(GazeSample {
            timestamp_ms: s.timestamp_ms,
            x: p.x,
            y: p.y,
            level: s.level,
            event: s.event,
        });
    }
    if kept.is_empty() {
        return Err(IngestError::EmptySession);
    }
    Ok(CleanSession {
        samples: kept,
        events,
        aoi_map,
        screen,
        dropped_count: dropped,
    })
}

/// Grows an AOI to the minimum reliable size, expanding symmetrically about
/// its center, then translates (or as a last resort shrinks) it to lie
/// fully within the screen.
///
/// An already-conforming AOI is returned unchanged, which makes the
/// function exactly idempotent (re-deriving the position from the center
/// would drift by an ulp).
pub fn normalize_aoi(a: AoiRect, screen: &ScreenConfig) -> AoiRect {
    let w_screen = screen.width as f64;
    let h_screen = screen.height as f64;
    let w = a.w.max(screen.min_aoi_size).min(w_screen);
    let h = a.h.max(screen.min_aoi_size).min(h_screen);
    if w == a.w && h == a.h && a.x >= 0.0 && a.y >= 0.0
        && a.x <= w_screen - w
        && a.y <= h_screen - h
    {
        return a;
    }
    let cx = a.x + a.w / 2.0;
    let cy = a.y + a.h / 2.0;
    let x = (cx - w / 2.0).clamp(0.0, w_screen - w);
    let y = (cy - h / 2.0).clamp(0.0, h_screen - h);
    AoiRect {
        name: a.name,
        x,
        y,
        w,
        h,
        role: a.role,
    }
}

/// The f_AOI lookup: total, deterministic, first match wins.
pub fn map_to_aoi(p: Point, m: &AoiMap) -> Option<&str> {
    m.lookup(p)
}
