//! Small helpers shared by the line-oriented text formats.

use std::io;
use std::path::Path;

/// Escapes tab, newline, carriage return and backslash so a field fits on one
/// tab-separated line.
pub(crate) fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_field(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

/// Formats reals with the shortest representation that parses back exactly.
pub(crate) fn fmt_vector(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    parts.join(",")
}

pub(crate) fn parse_vector(s: &str) -> Option<Vec<f64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.parse::<f64>().ok()).collect()
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    use std::io::Write;

    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escape_round_trip() {
        for s in ["plain", "a\tb", "x\\ny", "\\", "line\nbreak\r"] {
            let e = escape_field(s);
            assert!(!e.contains('\t') && !e.contains('\n'));
            assert_eq!(unescape_field(&e).as_deref(), Some(s));
        }
        assert_eq!(unescape_field("bad\\q"), None);
    }

    #[test]
    fn vectors_round_trip_exactly() {
        let v = vec![0.1, 2.0 / 3.0, 1e-300, 0.0, 1.0];
        assert_eq!(parse_vector(&fmt_vector(&v)).unwrap(), v);
        assert_eq!(parse_vector("").unwrap(), Vec::<f64>::new());
    }
}
