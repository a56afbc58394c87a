//! Plain-text tables, CSV and JSON serialisation shared by the commands.

use crate::CliError;

/// Two-column `key  value` listing with aligned values.
#[derive(Default)]
pub struct KeyValues {
    rows: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.rows.push((key.into(), value.into()));
        self
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        self.rows
            .iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

/// Column-aligned text table with a header line.
pub fn columns(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let joined: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        format!("  {}\n", joined.join("  "))
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(row).map_err(internal)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values built from strings and numbers");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values_align() {
        let mut kv = KeyValues::new();
        kv.row("a", "1").row("longer", "2");
        assert_eq!(kv.render(), "a       1\nlonger  2\n");
    }

    #[test]
    fn columns_right_align() {
        let t = columns(&["i", "value"], &[vec!["1".into(), "-0.5".into()]]);
        assert_eq!(t, "  i  value\n  1   -0.5\n");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let s = csv(&["k", "v"], &[vec!["a,b".into(), "1".into()]]).unwrap();
        assert_eq!(s, "k,v\n\"a,b\",1\n");
    }
}
