//! Matrix Market coordinate format.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{CooMatrix, CsrMatrix, MatrixError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<(Field, Symmetry), MatrixError> {
    let toks: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(MatrixError::parse(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    if toks[2] != "coordinate" {
        return Err(MatrixError::parse(1, format!("unsupported format '{}', only coordinate", toks[2])));
    }
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(MatrixError::parse(1, format!("unsupported field '{other}'"))),
    };
    let sym = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(MatrixError::parse(1, format!("unsupported symmetry '{other}'"))),
    };
    Ok((field, sym))
}

fn parse_index(tok: Option<&str>, bound: usize, what: &str, line: usize) -> Result<usize, MatrixError> {
    let tok = tok.ok_or_else(|| MatrixError::parse(line, format!("missing {what} index")))?;
    let i: usize = tok
        .parse()
        .map_err(|_| MatrixError::parse(line, format!("bad {what} index '{tok}'")))?;
    if i == 0 || i > bound {
        return Err(MatrixError::parse(line, format!("{what} index {i} outside 1..={bound}")));
    }
    Ok(i - 1)
}

/// Parses a Matrix Market coordinate stream. Symmetric input is expanded to
/// both triangles and duplicate coordinates are summed.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CooMatrix, MatrixError> {
    let mut lines = reader.lines().enumerate();
    let (field, sym) = match lines.next() {
        Some((_, l)) => parse_header(&l?)?,
        None => return Err(MatrixError::parse(1, "empty input")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut coo = CooMatrix::new(0, 0);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let Some((rows, cols, nnz)) = size else {
            let mut next = || -> Result<usize, MatrixError> {
                toks.next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| MatrixError::parse(lineno, "bad size line, expected 'rows cols nnz'"))
            };
            let dims = (next()?, next()?, next()?);
            if sym == Symmetry::Symmetric && dims.0 != dims.1 {
                return Err(MatrixError::parse(lineno, "symmetric matrix must be square"));
            }
            coo = CooMatrix::new(dims.0, dims.1);
            coo.entries.reserve(if sym == Symmetry::Symmetric { 2 * dims.2 } else { dims.2 });
            size = Some(dims);
            continue;
        };
        if seen == nnz {
            return Err(MatrixError::parse(lineno, format!("more than the declared {nnz} entries")));
        }
        let r = parse_index(toks.next(), rows, "row", lineno)?;
        let c = parse_index(toks.next(), cols, "column", lineno)?;
        let v = match field {
            Field::Pattern => 1.0,
            _ => {
                let tok = toks.next().ok_or_else(|| MatrixError::parse(lineno, "missing value"))?;
                tok.parse::<f64>()
                    .map_err(|_| MatrixError::parse(lineno, format!("bad value '{tok}'")))? as f32
            }
        };
        coo.entries.push((r, c, v));
        if sym == Symmetry::Symmetric && r != c {
            coo.entries.push((c, r, v));
        }
        seen += 1;
    }
    match size {
        None => Err(MatrixError::parse(1, "missing size line")),
        Some((_, _, nnz)) if seen < nnz => {
            Err(MatrixError::parse(0, format!("declared {nnz} entries, found {seen}")))
        }
        Some(_) => {
            coo.normalize();
            Ok(coo)
        }
    }
}

pub fn parse_matrix_market_str(text: &str) -> Result<CooMatrix, MatrixError> {
    parse_matrix_market(text.as_bytes())
}

pub fn read_matrix_market(path: &std::path::Path) -> Result<CsrMatrix, MatrixError> {
    let f = std::fs::File::open(path)?;
    parse_matrix_market(std::io::BufReader::new(f))?.to_csr()
}

/// Writes `m` as `coordinate real general`. Values use the shortest
/// representation that parses back to the same `f32`.
pub fn write_matrix_market<W: Write>(m: &CsrMatrix, mut out: W) -> std::io::Result<()> {
    let mut buf = String::with_capacity(64 + 24 * m.nnz());
    buf.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(buf, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for i in 0..m.rows() {
        let (cs, vs) = m.row(i);
        for (c, v) in cs.iter().zip(vs) {
            let _ = writeln!(buf, "{} {} {:?}", i + 1, c + 1, v);
        }
    }
    out.write_all(buf.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_real() {
        let text = "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 3.0\n2 2 4.0\n";
        let m = parse_matrix_market_str(text).unwrap();
        assert_eq!(m.entries, vec![(0, 0, 3.0), (1, 1, 4.0)]);
    }

    #[test]
    fn symmetric_expands_off_diagonal() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 5.0\n2 2 1.0\n";
        let m = parse_matrix_market_str(text).unwrap();
        assert_eq!(m.entries, vec![(0, 1, 5.0), (1, 0, 5.0), (1, 1, 1.0)]);
    }

    #[test]
    fn pattern_gets_unit_values() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 2\n";
        assert_eq!(parse_matrix_market_str(text).unwrap().entries, vec![(0, 1, 1.0)]);
    }

    #[test]
    fn integer_field() {
        let text = "%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 7\n";
        assert_eq!(parse_matrix_market_str(text).unwrap().entries, vec![(0, 0, 7.0)]);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        match parse_matrix_market_str(text) {
            Err(MatrixError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let text = "%%MatrixMarket matrix array real general\n2 2\n";
        assert!(matches!(parse_matrix_market_str(text), Err(MatrixError::Parse { line: 1, .. })));
        assert!(parse_matrix_market_str("hello\n").is_err());
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n";
        assert!(parse_matrix_market_str(text).is_err());
    }

    #[test]
    fn writer_round_trips() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 0.1\n3 1 -2.5e-3\n2 2 7\n";
        let a = parse_matrix_market_str(text).unwrap().to_csr().unwrap();
        let mut out = Vec::new();
        write_matrix_market(&a, &mut out).unwrap();
        let b = parse_matrix_market(&out[..]).unwrap().to_csr().unwrap();
        assert_eq!(a, b);
    }
}
