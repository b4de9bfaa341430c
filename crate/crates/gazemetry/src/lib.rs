//! IO, file formats, and orchestration around `gazemetry-core`: canonical
//! session CSV, AOI sidecars, key=value configs, synth specs, report
//! emission, and the analysis pipeline the CLI drives.

pub mod analyze;
pub mod aoi_file;
pub mod config;
pub mod error;
pub mod report_io;
pub mod session_file;
pub mod synth_cmd;
pub mod synth_file;

pub use analyze::{analyze_log, cmd_analyze, AnalyzeOutcome, AnalyzeRequest, TOOL_VERSION};
pub use config::EffectiveConfig;
pub use error::CliError;
pub use report_io::{emit_reports, parse_report, Formats};
pub use synth_cmd::{cmd_synth, SynthRequest};
