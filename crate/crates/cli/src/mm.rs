//! Matrix Market reading and writing for real symmetric matrices.
//!
//! Accepted headers are `matrix coordinate real symmetric` and
//! `matrix array real symmetric|general`. Everything is densified.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dstrans_core::{Matrix, SymMatrix};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub layout: Layout,
    pub symmetry: Symmetry,
    pub nrows: usize,
    pub ncols: usize,
    /// Stored entry count (coordinate only).
    pub nnz: Option<usize>,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SymMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix_market(BufReader::new(file), path)
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
    path: std::path::PathBuf,
}

impl<R: BufRead> Lines<R> {
    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.clone(), line: self.line, msg: msg.into() }
    }

    /// Next line that is neither blank nor a comment.
    fn next_data(&mut self) -> Result<Option<String>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l.map_err(|e| CliError::io(&self.path, e))?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Ok(Some(t.to_string()));
        }
        Ok(None)
    }

    fn expect_data(&mut self) -> Result<String> {
        self.next_data()?.ok_or_else(|| self.err("unexpected end of file"))
    }
}

fn parse_header_line(tokens: &[String]) -> std::result::Result<(Layout, Symmetry), String> {
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err("expected '%%MatrixMarket matrix <format> real <symmetry>'".into());
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(format!("unsupported format '{other}'")),
    };
    if tokens[3] != "real" {
        return Err(format!("unsupported field '{}', only real is accepted", tokens[3]));
    }
    let symmetry = match tokens[4].as_str() {
        "symmetric" => Symmetry::Symmetric,
        "general" if layout == Layout::Array => Symmetry::General,
        other => return Err(format!("unsupported symmetry '{other}' for {} format", tokens[2])),
    };
    Ok((layout, symmetry))
}

fn parse_usizes<R: BufRead>(lines: &Lines<R>, s: &str, count: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| lines.err(format!("bad size line: {e}")))?;
    if v.len() != count {
        return Err(lines.err(format!("size line needs {count} integers")));
    }
    Ok(v)
}

fn parse_value<R: BufRead>(lines: &Lines<R>, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| lines.err(format!("bad value '{s}'")))?;
    if !v.is_finite() {
        return Err(lines.err("non-finite value"));
    }
    Ok(v)
}

/// Parses a Matrix Market stream; `path` only labels errors.
pub fn parse_matrix_market<R: BufRead>(reader: R, path: &Path) -> Result<SymMatrix> {
    let mut lines = Lines { inner: reader.lines(), line: 0, path: path.to_path_buf() };
    let first = match lines.inner.next() {
        Some(l) => l.map_err(|e| CliError::io(path, e))?,
        None => return Err(lines.err("empty file")),
    };
    lines.line = 1;
    let tokens: Vec<String> = first.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    let (layout, symmetry) = parse_header_line(&tokens).map_err(|m| lines.err(m))?;

    let size = lines.expect_data()?;
    let (n, m, nnz) = match layout {
        Layout::Coordinate => {
            let v = parse_usizes(&lines, &size, 3)?;
            (v[0], v[1], Some(v[2]))
        }
        Layout::Array => {
            let v = parse_usizes(&lines, &size, 2)?;
            (v[0], v[1], None)
        }
    };
    if n != m {
        return Err(lines.err(format!("matrix is {n} x {m}, not square")));
    }
    if n == 0 {
        return Err(lines.err("matrix has dimension 0"));
    }
    let header = Header { layout, symmetry, nrows: n, ncols: m, nnz };

    let mut a = Matrix::zeros(n, n);
    match header.layout {
        Layout::Coordinate => {
            let nnz = header.nnz.unwrap_or(0);
            let mut seen = vec![false; n * n];
            for _ in 0..nnz {
                let l = lines.expect_data()?;
                let t: Vec<&str> = l.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(lines.err("entry needs 'row col value'"));
                }
                let idx = |s: &str| -> Result<usize> {
                    let i: usize = s.parse().map_err(|_| lines.err(format!("bad index '{s}'")))?;
                    if i == 0 || i > n {
                        return Err(lines.err(format!("index {i} out of range 1..={n}")));
                    }
                    Ok(i - 1)
                };
                let (i, j) = (idx(t[0])?, idx(t[1])?);
                let v = parse_value(&lines, t[2])?;
                let (i, j) = if i >= j { (i, j) } else { (j, i) };
                if std::mem::replace(&mut seen[i + j * n], true) {
                    return Err(lines.err(format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                a[(i, j)] = v;
            }
        }
        Layout::Array => {
            for j in 0..n {
                let start = if header.symmetry == Symmetry::Symmetric { j } else { 0 };
                for i in start..n {
                    let l = lines.expect_data()?;
                    a[(i, j)] = parse_value(&lines, &l)?;
                }
            }
            if header.symmetry == Symmetry::General {
                for j in 0..n {
                    for i in j + 1..n {
                        if a[(i, j)] != a[(j, i)] {
                            return Err(lines.err(format!(
                                "general array matrix is not symmetric at ({}, {})",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
    }
    if lines.next_data()?.is_some() {
        return Err(lines.err("trailing data after the last entry"));
    }
    Ok(SymMatrix::from_lower(&a)?)
}

/// Writes the nonzero lower triangle in coordinate symmetric format with
/// 17 significant digits.
pub fn write_matrix_market(path: impl AsRef<Path>, m: &SymMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_to(&mut w, m).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_to(w: &mut impl Write, m: &SymMatrix) -> std::io::Result<()> {
    let n = m.n();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            let v = m.get(i, j);
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{n} {n} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {v:.16e}", i + 1, j + 1)?;
    }
    Ok(())
}
