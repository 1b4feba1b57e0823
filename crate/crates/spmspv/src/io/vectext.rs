//! Plain-text sparse vector format: a `length nnz` header line, then one
//! `index value` line per entry with 0-based indices. Write then read is the
//! identity on logical content; sortedness is inferred on read, so a sorted
//! vector round-trips its mode too.

use crate::error::{Error, Result};
use crate::vector::{Mode, SparseVec};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub fn write_vec_to(mut w: impl Write, v: &SparseVec<f64>) -> Result<()> {
    writeln!(w, "{} {}", v.len(), v.nnz())?;
    for (i, x) in v.iter() {
        writeln!(w, "{i} {x}")?;
    }
    Ok(())
}

pub fn write_vec(path: impl AsRef<Path>, v: &SparseVec<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vec_to(&mut w, v)?;
    w.flush()?;
    Ok(())
}

pub fn read_vec_from(r: impl BufRead) -> Result<SparseVec<f64>> {
    let mut lines = r.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })
        .and_then(|(i, l)| l.map(|l| (i, l)).map_err(Error::Io))?;
    let mut words = first.split_whitespace();
    let len: usize = parse(words.next(), 1, "vector length")?;
    let nnz: usize = parse(words.next(), 1, "entry count")?;
    if words.next().is_some() {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be 'length nnz'".into(),
        });
    }

    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(nnz);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(Error::Io)?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if entries.len() == nnz {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more than the declared {nnz} entries"),
            });
        }
        let mut words = text.split_whitespace();
        let i: usize = parse(words.next(), lineno, "index")?;
        let v: f64 = parse(words.next(), lineno, "value")?;
        if words.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: "entry line must be 'index value'".into(),
            });
        }
        if i >= len {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("index {i} out of range for length {len}"),
            });
        }
        entries.push((i, v));
    }
    if entries.len() != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("file declares {nnz} entries but contains {}", entries.len()),
        });
    }

    let sorted = entries.windows(2).all(|w| w[0].0 < w[1].0);
    let mode = if sorted { Mode::Sorted } else { Mode::Unsorted };
    SparseVec::new(len, entries, mode).map_err(|e| match e {
        Error::DuplicateEntry { row, .. } => Error::Parse {
            line: 0,
            msg: format!("duplicate index {row}"),
        },
        other => other,
    })
}

pub fn read_vec(path: impl AsRef<Path>) -> Result<SparseVec<f64>> {
    read_vec_from(BufReader::new(File::open(path)?))
}

fn parse<T: std::str::FromStr>(word: Option<&str>, line: usize, what: &str) -> Result<T> {
    let w = word.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    w.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from '{w}'"),
    })
}
