use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

/// Writes to `path` via a sibling temporary file and a rename, so a failed
/// run never leaves a partial file. Without a path, writes to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        return out.flush().context("writing to stdout");
    };
    let name = path
        .file_name()
        .with_context(|| format!("output path {} has no file name", path.display()))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

/// Shortest decimal that round-trips after rounding to 10 significant digits.
pub fn tidy(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.9e}").parse().unwrap_or(v);
    rounded.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tidy_rounds_bisection_noise() {
        assert_eq!(tidy(0.09999999999999998), "0.1");
        assert_eq!(tidy(100.0), "100");
        assert_eq!(tidy(1.234e-7), "0.0000001234");
    }
}
