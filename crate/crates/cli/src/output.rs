use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Twelve significant digits; `NaN` marks a failed evaluation.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn output_path(out: &Path, name: &str, suffix: &str) -> PathBuf {
    out.join(format!("{name}_{suffix}"))
}
