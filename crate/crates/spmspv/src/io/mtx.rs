//! Matrix Market exchange format, coordinate variant.
//!
//! Supports real, integer and pattern fields with general or symmetric
//! symmetry. Entries are 1-based in the file and 0-based in memory.
//! Symmetric storage is expanded to general on read (both triangles,
//! diagonal once); pattern entries materialize as 1.0; integer values widen
//! to f64. Explicit zeros stay stored — sparsity is structural.

use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxField {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxSymmetry {
    General,
    Symmetric,
}

/// Parsed banner and size line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MtxHeader {
    pub field: MtxField,
    pub symmetry: MtxSymmetry,
    pub nrows: usize,
    pub ncols: usize,
    /// Entry lines in the file; after symmetric expansion the matrix may
    /// hold more.
    pub declared_nnz: usize,
}

fn parse_banner(line: &str) -> Result<(MtxField, MtxSymmetry)> {
    let lower = line.to_ascii_lowercase();
    let mut words = lower.split_whitespace();
    if words.next() != Some("%%matrixmarket") {
        return Err(Error::Parse {
            line: 1,
            msg: "first line must start with %%MatrixMarket".into(),
        });
    }
    if words.next() != Some("matrix") {
        return Err(Error::UnsupportedFormat(
            "only 'matrix' objects are supported".into(),
        ));
    }
    match words.next() {
        Some("coordinate") => {}
        Some(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "only coordinate format is supported, got '{other}'"
            )))
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing format word in banner".into(),
            })
        }
    }
    let field = match words.next() {
        Some("real") => MtxField::Real,
        Some("integer") => MtxField::Integer,
        Some("pattern") => MtxField::Pattern,
        Some(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "unsupported field '{other}' (real, integer or pattern)"
            )))
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing field word in banner".into(),
            })
        }
    };
    let symmetry = match words.next() {
        Some("general") => MtxSymmetry::General,
        Some("symmetric") => MtxSymmetry::Symmetric,
        Some(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "unsupported symmetry '{other}' (general or symmetric)"
            )))
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing symmetry word in banner".into(),
            })
        }
    };
    Ok((field, symmetry))
}

/// Read a coordinate Matrix Market stream into CSC.
pub fn read_mtx_from(reader: impl BufRead) -> Result<CscMatrix<f64>> {
    let mut lines = reader.lines().enumerate();

    let (_, banner) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })
        .and_then(|(i, l)| l.map(|l| (i, l)).map_err(Error::Io))?;
    let (field, symmetry) = parse_banner(&banner)?;

    // Size line: first non-comment, non-blank line after the banner.
    let mut header: Option<MtxHeader> = None;
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = 0usize;

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(Error::Io)?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let mut words = text.split_whitespace();
        match header {
            None => {
                let nrows = parse_num::<usize>(words.next(), lineno, "row count")?;
                let ncols = parse_num::<usize>(words.next(), lineno, "column count")?;
                let nnz = parse_num::<usize>(words.next(), lineno, "entry count")?;
                if words.next().is_some() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "size line must be 'rows cols nnz'".into(),
                    });
                }
                triples.reserve(if symmetry == MtxSymmetry::Symmetric {
                    nnz * 2
                } else {
                    nnz
                });
                header = Some(MtxHeader {
                    field,
                    symmetry,
                    nrows,
                    ncols,
                    declared_nnz: nnz,
                });
            }
            Some(ref h) => {
                if seen == h.declared_nnz {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("more than the declared {} entries", h.declared_nnz),
                    });
                }
                let i = parse_num::<usize>(words.next(), lineno, "row index")?;
                let j = parse_num::<usize>(words.next(), lineno, "column index")?;
                let v = match h.field {
                    MtxField::Pattern => 1.0,
                    _ => parse_num::<f64>(words.next(), lineno, "value")?,
                };
                if words.next().is_some() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "trailing tokens after entry".into(),
                    });
                }
                if i == 0 || j == 0 || i > h.nrows || j > h.ncols {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!(
                            "entry ({i}, {j}) outside 1..={} x 1..={}",
                            h.nrows, h.ncols
                        ),
                    });
                }
                let (r, c) = (i - 1, j - 1);
                triples.push((r, c, v));
                if h.symmetry == MtxSymmetry::Symmetric && r != c {
                    triples.push((c, r, v));
                }
                seen += 1;
            }
        }
    }

    let header = header.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing size line".into(),
    })?;
    if seen != header.declared_nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "file declares {} entries but contains {seen}",
                header.declared_nnz
            ),
        });
    }
    CscMatrix::from_triples(header.nrows, header.ncols, &triples)
}

fn parse_num<T: std::str::FromStr>(
    word: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    let w = word.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    w.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from '{w}'"),
    })
}

pub fn read_mtx(path: impl AsRef<Path>) -> Result<CscMatrix<f64>> {
    read_mtx_from(BufReader::new(File::open(path)?))
}

/// Write in coordinate/real/general form (the round-trip partner of
/// [`read_mtx`]).
pub fn write_mtx(path: impl AsRef<Path>, a: &CscMatrix<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (r, c, v) in a.to_triples() {
        writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
    }
    w.flush()?;
    Ok(())
}
