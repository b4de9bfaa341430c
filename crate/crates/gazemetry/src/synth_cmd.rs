//! The `synth` subcommand: generate a session file (and ground-truth
//! sidecar) from a spec, or from the built-in demo spec.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use gazemetry_core::synth::{generate_session, GroundTruth, SynthSpec};
use gazemetry_core::CleanSession;

use crate::error::CliError;
use crate::session_file::write_session;
use crate::synth_file::{read_spec, render_ground_truth};

pub struct SynthRequest {
    /// Spec file; `None` uses the built-in demo spec.
    pub spec_path: Option<PathBuf>,
    pub out_path: PathBuf,
    pub truth_path: Option<PathBuf>,
}

pub struct SynthOutcome {
    pub session: CleanSession,
    pub truth: GroundTruth,
    pub spec: SynthSpec,
    pub files_written: Vec<PathBuf>,
}

pub fn cmd_synth(req: &SynthRequest) -> Result<SynthOutcome, CliError> {
    let spec = match &req.spec_path {
        Some(path) => read_spec(path)?,
        None => SynthSpec::demo(),
    };
    let (session, truth) =
        generate_session(&spec).map_err(|e| CliError::SynthSpec(e.to_string()))?;

    let mut files = Vec::new();
    write_session_file(&req.out_path, &session, &spec)?;
    files.push(req.out_path.clone());

    let truth_path = req
        .truth_path
        .clone()
        .unwrap_or_else(|| req.out_path.with_extension("truth.txt"));
    std::fs::write(&truth_path, render_ground_truth(&truth)).map_err(|source| {
        CliError::Output {
            path: truth_path.clone(),
            source,
        }
    })?;
    files.push(truth_path);

    Ok(SynthOutcome {
        session,
        truth,
        spec,
        files_written: files,
    })
}

fn write_session_file(path: &Path, session: &CleanSession, spec: &SynthSpec) -> Result<(), CliError> {
    let file = File::create(path).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })?;
    write_session(BufWriter::new(file), session, &spec.aois).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}
