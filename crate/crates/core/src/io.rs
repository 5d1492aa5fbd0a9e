//! Reading observed data and writing results.
//!
//! Observations are CSV lines `a,l` (an optional header is skipped) or a JSON
//! array of `{"a": .., "l": ..}` objects. Rows with `l = 0` are atoms. Lines
//! starting with `#` are metadata; `# window=lo,hi` fixes the window.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::marks::Mark;
use crate::posterior::ObservedData;
use crate::prior::Window;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Parsed {
    marks: Vec<Mark>,
    window: Option<Window>,
}

fn parse_window(v: &str) -> Option<Window> {
    let mut it = v.split(',').map(|s| s.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(lo)), Some(Ok(hi)), None) => Window::new(lo, hi).ok(),
        _ => None,
    }
}

fn parse_csv(text: &str) -> Result<Parsed> {
    let mut marks = Vec::new();
    let mut window = None;
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                if k.trim() == "window" {
                    window = Some(parse_window(v).ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: format!("bad window '{}'", v.trim()),
                    })?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let parsed = (fields[0].parse::<f64>(), fields[1].parse::<f64>());
        let (a, l) = match parsed {
            (Ok(a), Ok(l)) => (a, l),
            _ if !seen_data && fields.iter().any(|f| f.chars().any(char::is_alphabetic)) => {
                // header row
                seen_data = true;
                continue;
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("cannot parse '{line}' as two numbers"),
                })
            }
        };
        seen_data = true;
        if !(a.is_finite() && l.is_finite()) {
            return Err(Error::Parse {
                line: line_no,
                msg: "non-finite value".into(),
            });
        }
        if l < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("negative interval length {l}"),
            });
        }
        marks.push(Mark { a, l });
    }
    Ok(Parsed { marks, window })
}

fn parse_json(text: &str) -> Result<Parsed> {
    let marks: Vec<Mark> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    if let Some((i, m)) = marks.iter().enumerate().find(|(_, m)| !(m.l >= 0.0)) {
        return Err(Error::Parse {
            line: i + 1,
            msg: format!("negative interval length {}", m.l),
        });
    }
    Ok(Parsed { marks, window: None })
}

/// Tight hull of the observations padded by 1% on each side.
pub fn infer_window(marks: &[Mark]) -> Window {
    if marks.is_empty() {
        return Window::unit();
    }
    let lo = marks.iter().map(|m| m.a).fold(f64::INFINITY, f64::min);
    let hi = marks.iter().map(|m| m.a + m.l).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let pad = if span > 0.0 { 0.01 * span } else { 0.01 * lo.abs().max(1.0) };
    Window {
        lo: lo - pad,
        hi: hi + pad,
    }
}

/// Parses observations from text. `window` overrides any window recorded in
/// the file; without either, the window is inferred.
pub fn parse_observed(text: &str, window: Option<Window>) -> Result<ObservedData> {
    let parsed = if text.trim_start().starts_with('[') {
        parse_json(text)?
    } else {
        parse_csv(text)?
    };
    let window = window
        .or(parsed.window)
        .unwrap_or_else(|| infer_window(&parsed.marks));
    ObservedData::from_marks(&parsed.marks, window)
}

pub fn ingest(path: &Path, window: Option<Window>) -> Result<ObservedData> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_observed(&text, window)
}

/// CSV text for observed data: metadata comments, a header, atoms then
/// intervals.
pub fn observed_to_csv(u: &ObservedData, meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    let w = u.window();
    let _ = writeln!(s, "# window={},{}", fmt_f64(w.lo), fmt_f64(w.hi));
    s.push_str("a,l\n");
    for &a in u.atoms() {
        let _ = writeln!(s, "{},{}", fmt_f64(a), fmt_f64(0.0));
    }
    for iv in u.intervals() {
        let _ = writeln!(s, "{},{}", fmt_f64(iv.a), fmt_f64(iv.l));
    }
    s
}

/// CSV text with one column per field and metadata comments.
pub fn table_to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>, meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
