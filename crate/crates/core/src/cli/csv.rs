//! CSV tables with a `#`-prefixed JSON metadata line ahead of the header row.
//! Floats use Rust's shortest round-trip formatting so identical inputs give
//! byte-identical files.

use std::path::Path;

use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub metadata: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(metadata: Value, header: &[&str]) -> Self {
        Self { metadata, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8");
        format!("# {}\n{body}", self.metadata)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }

    /// Parses text produced by [`render`](Self::render).
    pub fn parse(text: &str) -> Option<Self> {
        let (first, body) = text.split_once('\n')?;
        let metadata = serde_json::from_str(first.strip_prefix("# ")?).ok()?;
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let header = r.headers().ok()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .ok()?;
        Some(Self { metadata, header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}
