//! Verdict lines and their rendering.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: String,
    pub verdict: Verdict,
    /// One-line summary: canonical witness or counterexample.
    pub detail: String,
    /// Full witnesses, shown by `lnd report`.
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub entries: Vec<Entry>,
}

/// Longest detail printed in the short format, in characters.
pub const SHORT_DETAIL: usize = 160;

fn shorten(s: &str) -> String {
    if s.chars().count() <= SHORT_DETAIL {
        return s.to_string();
    }
    let mut out: String = s.chars().take(SHORT_DETAIL).collect();
    out.push('…');
    out
}

impl Report {
    pub fn count(&self, v: Verdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == v).count()
    }

    /// No FAIL and no ERROR.
    pub fn success(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Pass)
    }

    pub fn summary(&self) -> String {
        format!(
            "summary: {}/{}/{}",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Error)
        )
    }

    /// `PASS|FAIL|ERROR <name> — <detail>` per entry, then the summary.
    /// With `full`, details are not shortened and witnesses follow each line.
    pub fn render(&self, full: bool) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let detail = if full {
                e.detail.clone()
            } else {
                shorten(&e.detail)
            };
            out.push_str(&format!("{} {} — {}\n", e.verdict, e.name, detail));
            if full {
                for w in &e.witnesses {
                    out.push_str(&format!("    {w}\n"));
                }
            }
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }
}
