//! Plain-text file formats.
//!
//! Every file starts with `#` comment lines carrying provenance (format,
//! command, parameters, seed), then a `key=value` header line, then data.
//! Numbers are written with 17 significant digits so a write/read round
//! trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dendrogram::{Dendrogram, Level, Merge};
use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::similarity::SimilarityMatrix;
use crate::synth::AttributeTable;

pub const FORMAT_VERSION: u32 = 1;

/// Ordered `key: value` metadata written as comment lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn render(&self, kind: &str, out: &mut String) {
        let _ = writeln!(out, "# format: rhc-{kind} v{FORMAT_VERSION}");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
        }
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Lines of a file with comments split off.
struct Lines<'a> {
    provenance: Provenance,
    body: Vec<(usize, &'a str)>,
}

fn split(text: &str) -> Lines<'_> {
    let mut provenance = Provenance::new();
    let mut body = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = c.split_once(':') {
                let k = k.trim();
                if k != "format" {
                    provenance.entries.push((k.to_string(), v.trim().to_string()));
                }
            }
        } else if !trimmed.is_empty() {
            body.push((i + 1, line));
        }
    }
    Lines { provenance, body }
}

fn header_value(line: Option<&(usize, &str)>, key: &str) -> Result<usize> {
    let &(no, text) = line.ok_or_else(|| Error::parse(1, 1, format!("missing `{key}=` header")))?;
    let value = text
        .trim()
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(no, 1, format!("expected `{key}=<int>`")))?;
    value
        .trim()
        .parse()
        .map_err(|e| Error::parse(no, key.len() + 2, format!("bad {key}: {e}")))
}

fn fields(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty())
}

fn parse_row(no: usize, text: &str, expected: usize) -> Result<Vec<f64>> {
    let row = fields(text)
        .enumerate()
        .map(|(c, s)| s.parse::<f64>().map_err(|e| Error::parse(no, c + 1, format!("`{s}`: {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    if row.len() != expected {
        return Err(Error::parse(no, row.len().min(expected) + 1, format!("expected {expected} values, found {}", row.len())));
    }
    Ok(row)
}

pub fn format_similarity(sim: &SimilarityMatrix, provenance: &Provenance) -> String {
    let n = sim.len();
    let mut out = String::new();
    provenance.render("similarity", &mut out);
    let _ = writeln!(out, "n={n}");
    for i in 0..n {
        let row: Vec<String> = sim.row(i).iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_similarity(text: &str) -> Result<(SimilarityMatrix, Provenance)> {
    let lines = split(text);
    let n = header_value(lines.body.first(), "n")?;
    let rows = &lines.body[1..];
    if rows.len() != n {
        let line = rows.last().map_or(1, |r| r.0);
        return Err(Error::parse(line, 1, format!("expected {n} rows, found {}", rows.len())));
    }
    let mut values = Vec::with_capacity(n * n);
    for &(no, text) in rows {
        values.extend(parse_row(no, text, n)?);
    }
    Ok((SimilarityMatrix::from_vec(n, values)?, lines.provenance))
}

pub fn write_similarity(path: impl AsRef<Path>, sim: &SimilarityMatrix, provenance: &Provenance) -> Result<()> {
    fs::write(path, format_similarity(sim, provenance))?;
    Ok(())
}

pub fn read_similarity(path: impl AsRef<Path>) -> Result<(SimilarityMatrix, Provenance)> {
    parse_similarity(&fs::read_to_string(path)?)
}

pub fn format_labels(labels: &Labeling, provenance: &Provenance) -> String {
    let mut out = String::new();
    provenance.render("labels", &mut out);
    let _ = writeln!(out, "k={}", labels.k());
    for l in labels.labels() {
        let _ = writeln!(out, "{l}");
    }
    out
}

pub fn parse_labels(text: &str) -> Result<(Labeling, Provenance)> {
    let lines = split(text);
    let k = header_value(lines.body.first(), "k")?;
    let labels = lines.body[1..]
        .iter()
        .map(|&(no, t)| t.trim().parse::<usize>().map_err(|e| Error::parse(no, 1, format!("`{}`: {e}", t.trim()))))
        .collect::<Result<Vec<usize>>>()?;
    Ok((Labeling::new(labels, k)?, lines.provenance))
}

pub fn write_labels(path: impl AsRef<Path>, labels: &Labeling, provenance: &Provenance) -> Result<()> {
    fs::write(path, format_labels(labels, provenance))?;
    Ok(())
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<(Labeling, Provenance)> {
    parse_labels(&fs::read_to_string(path)?)
}

pub fn format_attributes(table: &AttributeTable, provenance: &Provenance) -> String {
    let mut out = String::new();
    provenance.render("attributes", &mut out);
    let _ = writeln!(out, "rows={}", table.rows);
    let _ = writeln!(out, "cols={}", table.cols);
    for r in 0..table.rows {
        let row: Vec<String> = table.row(r).iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_attributes(text: &str) -> Result<(AttributeTable, Provenance)> {
    let lines = split(text);
    let rows = header_value(lines.body.first(), "rows")?;
    let cols = header_value(lines.body.get(1), "cols")?;
    let data = lines.body.get(2..).unwrap_or(&[]);
    if data.len() != rows {
        let line = data.last().map_or(1, |r| r.0);
        return Err(Error::parse(line, 1, format!("expected {rows} rows, found {}", data.len())));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for &(no, text) in data {
        values.extend(parse_row(no, text, cols)?);
    }
    Ok((AttributeTable::new(rows, cols, values)?, lines.provenance))
}

/// A merge tree with its provenance.
///
/// Rows are `step  node  children  level`, children comma-separated and the
/// level written `t=<threshold>` or `h=<height>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MergeTreeFile {
    pub provenance: Provenance,
    pub tree: Dendrogram,
}

impl MergeTreeFile {
    pub fn format(&self) -> String {
        let n = self.tree.n_leaves();
        let mut out = String::new();
        self.provenance.render("tree", &mut out);
        let _ = writeln!(out, "n={n}");
        for (step, m) in self.tree.merges().iter().enumerate() {
            let children: Vec<String> = m.children.iter().map(|c| c.to_string()).collect();
            let level = match m.level {
                Level::Threshold(t) => format!("t={t}"),
                Level::Height(h) => format!("h={}", fmt_value(h)),
            };
            let _ = writeln!(out, "{step}\t{}\t{}\t{level}", n + step, children.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines = split(text);
        let n = header_value(lines.body.first(), "n")?;
        let mut merges = Vec::new();
        for &(no, text) in &lines.body[1..] {
            let cols: Vec<&str> = text.split('\t').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(Error::parse(no, cols.len().min(4) + 1, "expected 4 tab-separated columns"));
            }
            let int = |c: usize| -> Result<usize> {
                cols[c].parse().map_err(|e| Error::parse(no, c + 1, format!("`{}`: {e}", cols[c])))
            };
            let step = int(0)?;
            let node = int(1)?;
            if step != merges.len() || node != n + step {
                return Err(Error::parse(no, 1, "rows must be numbered densely from node n"));
            }
            let children = cols[2]
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| Error::parse(no, 3, format!("`{s}`: {e}"))))
                .collect::<Result<Vec<usize>>>()?;
            let level = if let Some(t) = cols[3].strip_prefix("t=") {
                Level::Threshold(t.parse().map_err(|e| Error::parse(no, 4, format!("`{t}`: {e}")))?)
            } else if let Some(h) = cols[3].strip_prefix("h=") {
                Level::Height(h.parse().map_err(|e| Error::parse(no, 4, format!("`{h}`: {e}")))?)
            } else {
                return Err(Error::parse(no, 4, "level must be `t=<int>` or `h=<float>`"));
            };
            merges.push(Merge { children, level });
        }
        Ok(MergeTreeFile {
            provenance: lines.provenance,
            tree: Dendrogram::new(n, merges)?,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.format())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymmetric_file() {
        let text = "n=2\n1 0.5\n0.25 1\n";
        assert!(matches!(parse_similarity(text), Err(Error::Asymmetry(0, 1))));
    }

    #[test]
    fn parse_error_position() {
        let text = "# note: x\nn=2\n1 0.5\n0.5 oops\n";
        match parse_similarity(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (4, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn labels_round_trip() {
        let l = Labeling::new(vec![1, 2, 2, 3], 3).unwrap();
        let p = Provenance::new().with("seed", 4);
        let (back, prov) = parse_labels(&format_labels(&l, &p)).unwrap();
        assert_eq!(back, l);
        assert_eq!(prov.get("seed"), Some("4"));
    }

    #[test]
    fn tree_round_trip() {
        let tree = Dendrogram::new(
            3,
            vec![
                Merge { children: vec![0, 2], level: Level::Height(0.1) },
                Merge { children: vec![3, 1], level: Level::Threshold(4) },
            ],
        )
        .unwrap();
        let f = MergeTreeFile { provenance: Provenance::new().with("algorithm", "test"), tree };
        assert_eq!(MergeTreeFile::parse(&f.format()).unwrap(), f);
    }
}
