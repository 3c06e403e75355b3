use std::fmt::{self, Write as _};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Table { title: title.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(cells.into_iter().map(|c| c.to_string()).collect());
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, cells: &[String]| -> fmt::Result {
            let mut s = String::from(" ");
            for (i, c) in cells.iter().enumerate().take(cols) {
                let pad = widths[i] - c.chars().count();
                write!(s, " {c}{}", " ".repeat(pad)).unwrap();
                if i + 1 < cols {
                    s.push(' ');
                }
            }
            writeln!(f, "{}", s.trim_end())
        };
        line(f, &self.header)?;
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(f, &rule)?;
        for r in &self.rows {
            line(f, r)?;
        }
        Ok(())
    }
}

/// The outcome of one command on one document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input: String,
    /// SHA-256 of the input bytes.
    pub input_digest: String,
    pub field: u32,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    /// Noteworthy observations that are not verdicts.
    pub flags: Vec<String>,
    /// Command-specific structured results.
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, input: &str, bytes: &[u8], field: u32) -> Self {
        RunReport {
            command: command.to_string(),
            input: input.to_string(),
            input_digest: digest(bytes),
            field,
            tables: Vec::new(),
            verdicts: Vec::new(),
            flags: Vec::new(),
            details: Value::Object(Default::default()),
            wall_time_ms: None,
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, holds: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), holds, detail: detail.into() });
    }

    pub fn flag(&mut self, text: impl Into<String>) {
        self.flags.push(text.into());
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.details.as_object_mut().expect("details is an object").insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}  (F_{}, sha256 {})", self.command, self.input, self.field, &self.input_digest[..12])?;
        for t in &self.tables {
            writeln!(f)?;
            write!(f, "{t}")?;
        }
        if !self.verdicts.is_empty() {
            writeln!(f)?;
            writeln!(f, "verdicts")?;
            for v in &self.verdicts {
                let mark = if v.holds { "ok  " } else { "FAIL" };
                if v.detail.is_empty() {
                    writeln!(f, "  [{mark}] {}", v.name)?;
                } else {
                    writeln!(f, "  [{mark}] {}: {}", v.name, v.detail)?;
                }
            }
        }
        if !self.flags.is_empty() {
            writeln!(f)?;
            writeln!(f, "flags")?;
            for s in &self.flags {
                writeln!(f, "  * {s}")?;
            }
        }
        if let Some(ms) = self.wall_time_ms {
            writeln!(f)?;
            writeln!(f, "wall time {ms:.1} ms")?;
        }
        Ok(())
    }
}

/// Reports of one command over the whole gallery, in gallery order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub command: String,
    pub cases: Vec<BatchCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchCase {
    pub name: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<RunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BatchReport {
    pub fn exit_code(&self) -> i32 {
        self.cases.iter().map(|c| c.exit_code).max().unwrap_or(0)
    }
}

impl fmt::Display for BatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            writeln!(f, "=== {} (exit {})", c.name, c.exit_code)?;
            match (&c.report, &c.error) {
                (Some(r), _) => write!(f, "{r}")?,
                (None, Some(e)) => writeln!(f, "error: {e}")?,
                (None, None) => {}
            }
            writeln!(f)?;
        }
        let failed = self.cases.iter().filter(|c| c.exit_code != 0).count();
        writeln!(f, "{} cases, {failed} not passing", self.cases.len())
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_alignment() {
        let mut t = Table::new("dims", &["q", "H^q"]);
        t.row(["0", "1"]);
        t.row(["10", "22"]);
        let s = t.to_string();
        assert_eq!(s, "dims\n  q   H^q\n  --  ---\n  0   1\n  10  22\n");
    }

    #[test]
    fn exit_codes_and_json() {
        let mut r = RunReport::new("validate", "x.json", b"{}", 2);
        assert_eq!(r.exit_code(), 0);
        r.verdict("a", false, "");
        assert_eq!(r.exit_code(), 1);
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("wall_time_ms"));
        assert!(json.contains(&digest(b"{}")));
    }
}
