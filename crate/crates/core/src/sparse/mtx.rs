//! Matrix Market coordinate format: the `real`, `integer` and `pattern`
//! fields with `general` or `symmetric` storage.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{coo_to_csr, CooMatrix, CsrMatrix, Result, SparseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmField {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(SparseError::Parse {
        line,
        msg: msg.into(),
    })
}

fn parse_banner(line: &str, lineno: usize) -> Result<(MmField, MmSymmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return parse_err(lineno, "expected a %%MatrixMarket banner");
    }
    if tokens.len() != 5 {
        return parse_err(lineno, "banner must have the form '%%MatrixMarket matrix coordinate <field> <symmetry>'");
    }
    if tokens[1] != "matrix" {
        return parse_err(lineno, format!("unsupported object '{}'", tokens[1]));
    }
    match tokens[2].as_str() {
        "coordinate" => {}
        "array" => return parse_err(lineno, "array (dense) format is not supported"),
        other => return parse_err(lineno, format!("unknown format '{other}'")),
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => MmField::Real,
        "integer" => MmField::Integer,
        "pattern" => MmField::Pattern,
        "complex" => return parse_err(lineno, "complex values are not supported"),
        other => return parse_err(lineno, format!("unknown field '{other}'")),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "hermitian" | "skew-symmetric" => {
            return parse_err(lineno, format!("'{}' storage is not supported", tokens[4]))
        }
        other => return parse_err(lineno, format!("unknown symmetry '{other}'")),
    };
    Ok((field, symmetry))
}

fn parse_index(tok: Option<&str>, bound: usize, what: &str, lineno: usize) -> Result<usize> {
    let Some(tok) = tok else {
        return parse_err(lineno, format!("missing {what} index"));
    };
    let i: usize = match tok.parse() {
        Ok(i) => i,
        Err(_) => return parse_err(lineno, format!("cannot parse {what} index '{tok}'")),
    };
    if i == 0 || i > bound {
        return parse_err(lineno, format!("{what} index {i} outside 1..={bound}"));
    }
    Ok(i - 1)
}

/// Reads a Matrix Market coordinate matrix.
///
/// Indices become 0-based, symmetric storage is expanded to both triangles,
/// pattern entries get the value 1.0 and explicit zeros are dropped.
/// Every error carries the 1-based line number where it was detected.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CooMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (field, symmetry) = match lines.next() {
        Some((n, Ok(l))) => parse_banner(&l, n)?,
        Some((n, Err(e))) => return parse_err(n, e.to_string()),
        None => return parse_err(1, "empty input"),
    };

    let mut coo: Option<CooMatrix> = None;
    let mut declared = 0usize;
    let mut seen = 0usize;
    let mut coords = HashSet::new();
    let mut last_line = 1;

    for (lineno, line) in lines {
        last_line = lineno;
        let line = match line {
            Ok(l) => l,
            Err(e) => return parse_err(lineno, e.to_string()),
        };
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut tok = t.split_whitespace();
        let Some(m) = coo.as_mut() else {
            let dims: Vec<usize> = match tok.map(str::parse).collect::<std::result::Result<_, _>>() {
                Ok(d) => d,
                Err(_) => return parse_err(lineno, "cannot parse size line"),
            };
            if dims.len() != 3 {
                return parse_err(lineno, "size line must hold 'rows cols entries'");
            }
            if symmetry == MmSymmetry::Symmetric && dims[0] != dims[1] {
                return parse_err(lineno, "symmetric matrix must be square");
            }
            declared = dims[2];
            coo = Some(CooMatrix::new(dims[0], dims[1]));
            continue;
        };
        if seen == declared {
            return parse_err(lineno, format!("more than the declared {declared} entries"));
        }
        let row = parse_index(tok.next(), m.n_rows, "row", lineno)?;
        let col = parse_index(tok.next(), m.n_cols, "column", lineno)?;
        let value = match field {
            MmField::Pattern => 1.0,
            MmField::Real | MmField::Integer => {
                let Some(v) = tok.next() else {
                    return parse_err(lineno, "missing value");
                };
                match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => x,
                    _ => return parse_err(lineno, format!("cannot parse value '{v}'")),
                }
            }
        };
        if tok.next().is_some() {
            return parse_err(lineno, "trailing tokens after entry");
        }
        seen += 1;

        let mirrored = symmetry == MmSymmetry::Symmetric && row != col;
        if !coords.insert((row, col)) || (mirrored && !coords.insert((col, row))) {
            return parse_err(lineno, format!("duplicate entry ({}, {})", row + 1, col + 1));
        }
        if value == 0.0 {
            continue;
        }
        m.push(row, col, value);
        if mirrored {
            m.push(col, row, value);
        }
    }

    let Some(m) = coo else {
        return parse_err(last_line, "missing size line");
    };
    if seen != declared {
        return parse_err(
            last_line,
            format!("expected {declared} entries, found {seen}"),
        );
    }
    Ok(m)
}

/// Reads a Matrix Market file straight into CSR.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let f = File::open(path.as_ref())
        .map_err(|e| SparseError::Io(format!("{}: {e}", path.as_ref().display())))?;
    coo_to_csr(&parse_matrix_market(BufReader::new(f))?)
}

/// Writes `m` as a `real general` coordinate matrix. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix_market<W: Write>(m: &CsrMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for j in 0..m.n_rows() {
        let (cols, vals) = m.row(j);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(out, "{} {} {}", j + 1, c + 1, v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<CooMatrix> {
        parse_matrix_market(s.as_bytes())
    }

    fn line_of(r: Result<CooMatrix>) -> usize {
        match r {
            Err(SparseError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn general_real() {
        let m = parse(
            "%%MatrixMarket matrix coordinate real general\n% comment\n3 3 2\n1 1 5.0\n3 2 -2.0\n",
        )
        .unwrap();
        assert_eq!((m.n_rows, m.n_cols), (3, 3));
        assert_eq!(m.entries, vec![(0, 0, 5.0), (2, 1, -2.0)]);
    }

    #[test]
    fn symmetric_expands_off_diagonal_only() {
        let m = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 4.0\n1 1 3\n").unwrap();
        assert_eq!(m.entries, vec![(1, 0, 4.0), (0, 1, 4.0), (0, 0, 3.0)]);
    }

    #[test]
    fn pattern_gets_unit_values() {
        let m = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 2\n").unwrap();
        assert_eq!(m.entries, vec![(0, 1, 1.0)]);
    }

    #[test]
    fn integer_field_and_case_insensitive_banner() {
        let m = parse("%%MatrixMarket Matrix Coordinate Integer General\n1 2 1\n1 2 7\n").unwrap();
        assert_eq!(m.entries, vec![(0, 1, 7.0)]);
    }

    #[test]
    fn explicit_zeros_dropped() {
        let m = parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 0.0\n2 2 1.5\n").unwrap();
        assert_eq!(m.entries, vec![(1, 1, 1.5)]);
    }

    #[test]
    fn rejections_carry_line_numbers() {
        assert_eq!(line_of(parse("%%MatrixMarket matrix coordinate real\n")), 1);
        assert_eq!(line_of(parse("hello\n1 1 1\n")), 1);
        assert_eq!(line_of(parse("%%MatrixMarket matrix array real general\n2 2\n")), 1);
        assert_eq!(line_of(parse("%%MatrixMarket matrix coordinate complex general\n")), 1);
        assert_eq!(line_of(parse("%%MatrixMarket matrix coordinate real hermitian\n")), 1);
        assert_eq!(
            line_of(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n")),
            3
        );
        assert_eq!(
            line_of(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n")),
            3
        );
        assert_eq!(
            line_of(parse(
                "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n%\n1 1 2.0\n"
            )),
            5
        );
        assert_eq!(
            line_of(parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n")),
            3
        );
        assert_eq!(line_of(parse("")), 1);
    }

    #[test]
    fn symmetric_mirror_duplicate_rejected() {
        let r = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 1.0\n1 2 1.0\n");
        assert_eq!(line_of(r), 4);
    }

    #[test]
    fn write_then_read() {
        let coo = parse("%%MatrixMarket matrix coordinate real general\n3 4 3\n1 4 0.1\n3 2 -2.5e-7\n2 2 3\n")
            .unwrap();
        let csr = coo_to_csr(&coo).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&csr, &mut buf).unwrap();
        let back = coo_to_csr(&parse_matrix_market(buf.as_slice()).unwrap()).unwrap();
        assert_eq!(back, csr);
    }
}
