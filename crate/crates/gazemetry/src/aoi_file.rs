//! AOI sidecar format: one AOI per line, whitespace-separated —
//! `name x y w h [bin|other]`. Names must not contain whitespace; the role
//! defaults to `bin`. `#` starts a comment.

use std::fs;
use std::path::Path;

use gazemetry_core::ingest::{AoiRect, AoiRole};

use crate::error::CliError;

pub fn read_aois(path: &Path) -> Result<Vec<AoiRect>, CliError> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        row: None,
        message: e.to_string(),
    })?;
    parse_aois(&text, path)
}

pub fn parse_aois(text: &str, path: &Path) -> Result<Vec<AoiRect>, CliError> {
    let err = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        row: Some(line),
        message,
    };
    let mut aois = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 && parts.len() != 6 {
            return Err(err(i + 1, format!("expected `name x y w h [role]`, got {line:?}")));
        }
        let num = |idx: usize, what: &str| -> Result<f64, CliError> {
            parts[idx]
                .parse::<f64>()
                .map_err(|_| err(i + 1, format!("bad {what} {:?}", parts[idx])))
        };
        let mut rect = AoiRect::new(parts[0], num(1, "x")?, num(2, "y")?, num(3, "w")?, num(4, "h")?);
        if parts.len() == 6 {
            rect.role = match parts[5] {
                "bin" => AoiRole::Bin,
                "other" => AoiRole::Other,
                bad => return Err(err(i + 1, format!("role must be bin|other, got {bad:?}"))),
            };
        }
        aois.push(rect);
    }
    Ok(aois)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn parses_lines_and_roles() {
        let aois = parse_aois(
            "# bins\nglass_bin 100 100 200 200\nhud 0 0 300 40 other\n",
            &PathBuf::from("aoi.txt"),
        )
        .unwrap();
        assert_eq!(aois.len(), 2);
        assert_eq!(aois[0].name, "glass_bin");
        assert_eq!(aois[0].role, AoiRole::Bin);
        assert_eq!(aois[1].role, AoiRole::Other);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_aois("glass 1 2 3\n", &PathBuf::from("a")).is_err());
        assert!(parse_aois("glass 1 2 3 x\n", &PathBuf::from("a")).is_err());
        assert!(parse_aois("glass 1 2 3 4 hero\n", &PathBuf::from("a")).is_err());
    }
}
