//! Signal CSV and manifest file handling.
//!
//! Signal files are plain CSV: either an optional `sample_rate=<Hz>` header
//! followed by one amplitude per line, or two columns `time,amplitude` with
//! the rate inferred from the first two rows. Floats are written in
//! shortest round-trip form, so rereading a file reproduces the samples bit
//! for bit.

use std::fs;
use std::path::{Path, PathBuf};

use fmdiag_core::Signal;

use crate::CliError;

/// Minimum record length accepted by the pipeline commands.
pub const MIN_PIPELINE_SAMPLES: usize = 1000;

pub fn read_signal(path: &Path) -> Result<Signal, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_signal(&text, path)
}

fn parse_signal(text: &str, path: &Path) -> Result<Signal, CliError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();
    let bad = |line: &str, why: &str| {
        CliError::Data(format!("{}: bad line {line:?}: {why}", path.display()))
    };

    let mut sample_rate = None;
    if let Some(first) = lines.peek() {
        if let Some(rate) = first.strip_prefix("sample_rate=") {
            sample_rate = Some(
                rate.parse::<f64>()
                    .map_err(|e| bad(first, &format!("unparsable sample rate: {e}")))?,
            );
            lines.next();
        }
    }

    let mut samples = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for line in lines {
        if let Some((t, a)) = line.split_once(',') {
            if sample_rate.is_some() {
                return Err(bad(
                    line,
                    "two-column rows cannot follow a sample_rate header",
                ));
            }
            times.push(t.trim().parse().map_err(|e| bad(line, &format!("{e}")))?);
            samples.push(a.trim().parse().map_err(|e| bad(line, &format!("{e}")))?);
        } else {
            samples.push(line.parse().map_err(|e| bad(line, &format!("{e}")))?);
        }
    }

    let rate = match sample_rate {
        Some(r) => r,
        None if times.len() >= 2 => {
            let dt = times[1] - times[0];
            if dt.is_nan() || dt <= 0.0 {
                return Err(CliError::Data(format!(
                    "{}: time column must increase",
                    path.display()
                )));
            }
            1.0 / dt
        }
        _ => {
            return Err(CliError::Data(format!(
                "{}: no sample_rate header and no time column",
                path.display()
            )));
        }
    };

    Signal::new(samples, rate).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Read a signal and enforce the pipeline minimum length.
pub fn read_pipeline_signal(path: &Path) -> Result<Signal, CliError> {
    let signal = read_signal(path)?;
    if signal.len() < MIN_PIPELINE_SAMPLES {
        return Err(CliError::Data(format!(
            "{}: {} samples, pipeline commands need at least {MIN_PIPELINE_SAMPLES}",
            path.display(),
            signal.len()
        )));
    }
    Ok(signal)
}

pub fn write_signal(path: &Path, signal: &Signal) -> Result<(), CliError> {
    let mut out = String::with_capacity(signal.len() * 12);
    out.push_str(&format!("sample_rate={}\n", signal.sample_rate()));
    for v in signal.samples() {
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// A manifest maps condition labels to signal-file lists; JSON object order
/// is preserved, so the first declared label wins exact classification ties.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, Vec<PathBuf>)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: malformed manifest: {e}", path.display())))?;
    let object = value.as_object().ok_or_else(|| {
        CliError::Usage(format!(
            "{}: manifest must be a JSON object mapping labels to file lists",
            path.display()
        ))
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut manifest = Vec::with_capacity(object.len());
    for (label, files) in object {
        let list = files.as_array().ok_or_else(|| {
            CliError::Usage(format!(
                "{}: entry {label:?} is not a file list",
                path.display()
            ))
        })?;
        let mut paths = Vec::with_capacity(list.len());
        for f in list {
            let s = f.as_str().ok_or_else(|| {
                CliError::Usage(format!(
                    "{}: entry {label:?} contains a non-string file name",
                    path.display()
                ))
            })?;
            let p = PathBuf::from(s);
            // relative entries resolve against the manifest's directory
            paths.push(if p.is_absolute() { p } else { base.join(p) });
        }
        manifest.push((label.clone(), paths));
    }
    if manifest.is_empty() || manifest.iter().any(|(_, files)| files.is_empty()) {
        return Err(CliError::Usage(format!(
            "{}: manifest needs at least one label and no empty file lists",
            path.display()
        )));
    }
    Ok(manifest)
}
