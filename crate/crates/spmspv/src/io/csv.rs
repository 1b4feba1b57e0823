//! Minimal RFC-4180-style CSV: comma-separated, header row, quotes around
//! fields containing commas, quotes or newlines, doubled quotes inside
//! quoted fields. Enough for the benchmark result schema and its readers.

use crate::error::{Error, Result};
use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// One CSV line, no terminator.
pub fn format_csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| escape(f))
        .collect::<Vec<_>>()
        .join(",")
}

/// Append one row, writing the header first if the file is new or empty.
/// If the file already has a header it must match `header`.
pub fn append_csv_row(path: impl AsRef<Path>, header: &[&str], fields: &[String]) -> Result<()> {
    if fields.len() != header.len() {
        return Err(Error::InvalidConfig(format!(
            "row has {} fields but the schema has {} columns",
            fields.len(),
            header.len()
        )));
    }
    let path = path.as_ref();
    let existing = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if existing == 0 {
        let head: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        writeln!(file, "{}", format_csv_row(&head))?;
    } else {
        let (head, _) = read_csv(path)?;
        if head != header {
            return Err(Error::InvalidConfig(format!(
                "existing file {} has a different header",
                path.display()
            )));
        }
    }
    writeln!(file, "{}", format_csv_row(fields))?;
    Ok(())
}

/// Parse CSV text into rows of fields. Handles quoted fields, doubled
/// quotes and CRLF line ends; a trailing newline does not produce an empty
/// record.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    let mut row: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut in_quotes = false;
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut any = false;

    while let Some(c) = chars.next() {
        any = true;
        if in_quotes {
            match c {
                '"' => {
                    if chars.peek() == Some(&'"') {
                        chars.next();
                        field.push('"');
                    } else {
                        in_quotes = false;
                    }
                }
                '\n' => {
                    field.push(c);
                    line += 1;
                }
                _ => field.push(c),
            }
        } else {
            match c {
                '"' => {
                    if !field.is_empty() {
                        return Err(Error::Parse {
                            line,
                            msg: "quote inside unquoted field".into(),
                        });
                    }
                    in_quotes = true;
                }
                ',' => {
                    row.push(std::mem::take(&mut field));
                }
                '\r' => {
                    if chars.peek() == Some(&'\n') {
                        continue;
                    }
                    field.push(c);
                }
                '\n' => {
                    row.push(std::mem::take(&mut field));
                    rows.push(std::mem::take(&mut row));
                    line += 1;
                }
                _ => field.push(c),
            }
        }
    }
    if in_quotes {
        return Err(Error::Parse {
            line,
            msg: "unterminated quoted field".into(),
        });
    }
    if any && (!field.is_empty() || !row.is_empty()) {
        row.push(field);
        rows.push(row);
    }
    Ok(rows)
}

/// Read a CSV file as (header, data rows).
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    let mut rows = parse_csv(&text)?;
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "missing header row".into(),
        });
    }
    let header = rows.remove(0);
    for (k, r) in rows.iter().enumerate() {
        if r.len() != header.len() {
            return Err(Error::Parse {
                line: k + 2,
                msg: format!("row has {} fields, header has {}", r.len(), header.len()),
            });
        }
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &[&str] = &["alg", "threads", "us"];

    fn row(a: &str, b: u64, c: u64) -> Vec<String> {
        vec![a.to_string(), b.to_string(), c.to_string()]
    }

    #[test]
    fn first_append_writes_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        append_csv_row(&path, HEADER, &row("bucket", 2, 13)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), "alg,threads,us");
    }

    #[test]
    fn two_appends_three_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        append_csv_row(&path, HEADER, &row("bucket", 1, 5)).unwrap();
        append_csv_row(&path, HEADER, &row("sort", 1, 9)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn hundred_appends_reparse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        for k in 0..100u64 {
            append_csv_row(&path, HEADER, &row("bucket", k, k * 3)).unwrap();
        }
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, HEADER);
        assert_eq!(rows.len(), 100);
        for (k, r) in rows.iter().enumerate() {
            assert_eq!(r[1], k.to_string());
            assert_eq!(r[2], (k * 3).to_string());
        }
    }

    #[test]
    fn schema_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        append_csv_row(&path, HEADER, &row("bucket", 1, 1)).unwrap();
        assert!(append_csv_row(&path, &["other"], &vec!["x".to_string()]).is_err());
        assert!(append_csv_row(&path, HEADER, &vec!["short".to_string()]).is_err());
    }

    #[test]
    fn quoting_round_trip() {
        let fields = vec![
            "plain".to_string(),
            "with,comma".to_string(),
            "with \"quote\"".to_string(),
            "multi\nline".to_string(),
        ];
        let line = format_csv_row(&fields);
        let rows = parse_csv(&format!("{line}\n")).unwrap();
        assert_eq!(rows, vec![fields]);
    }

    #[test]
    fn malformed_inputs_error_not_panic() {
        assert!(parse_csv("a,\"unterminated\n").is_err());
        assert!(parse_csv("bad\"quote,1\n").is_err());
        assert!(parse_csv("").unwrap().is_empty());
    }
}
