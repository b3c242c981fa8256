//! Text formats for sparse binary matrices: MacKay alist and Matrix Market
//! coordinate pattern. Both are 1-indexed.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

const MTX_HEADER: &str = "%%MatrixMarket matrix coordinate pattern general";

fn join(xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes `m` in alist form: `cols rows`, max column and row weights, the
/// column weights, the row weights, then the 1-indexed row list of every
/// column and the column list of every row.
pub fn write_alist(m: &BitMatrix) -> String {
    let cols: Vec<Vec<usize>> = (0..m.cols()).map(|j| m.col_support(j)).collect();
    let rows: Vec<Vec<usize>> = (0..m.rows()).map(|i| m.row_support(i)).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let max_c = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_r = rows.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(out, "{max_c} {max_r}");
    let _ = writeln!(out, "{}", join(cols.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(rows.iter().map(Vec::len)));
    for c in cols.iter().chain(&rows) {
        let _ = writeln!(out, "{}", join(c.iter().map(|x| x + 1)));
    }
    out
}

fn numbers(line: &str, lineno: usize, format: &'static str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::Format {
                format,
                line: lineno,
                message: format!("expected a non-negative integer, found {t:?}"),
            })
        })
        .collect()
}

/// Reads an alist file.
///
/// Accepts the standard layout with weight lines (index lists either exact or
/// zero-padded to the maximum weight) and a short layout without weight lines,
/// one index list per line. Zero indices are padding and ignored. Column and
/// row lists must describe the same matrix.
pub fn read_alist(text: &str) -> Result<BitMatrix> {
    const F: &str = "alist";
    let err = |line: usize, message: String| Error::Format { format: F, line, message };
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    let mut tokens: Vec<(usize, usize)> = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        tokens.extend(numbers(l, i + 1, F)?.into_iter().map(|x| (i + 1, x)));
    }
    if tokens.len() < 4 {
        return Err(err(lines.len(), "truncated header".into()));
    }
    let (cols, rows) = (tokens[0].1, tokens[1].1);
    let (max_c, max_r) = (tokens[2].1, tokens[3].1);
    let rest = &tokens[4..];

    // (line, index) lists, columns first
    let mut lists: Vec<Vec<(usize, usize)>> = Vec::with_capacity(cols + rows);
    let weighted = rest.len() >= cols + rows && {
        let w: usize = rest[..cols + rows].iter().map(|t| t.1).sum();
        rest.len() == cols + rows + w
    };
    let padded = rest.len() == cols + rows + cols * max_c + rows * max_r;
    if weighted || padded {
        let weights: Vec<usize> = rest[..cols + rows].iter().map(|t| t.1).collect();
        let mut pos = cols + rows;
        for (k, &w) in weights.iter().enumerate() {
            let len = if weighted { w } else if k < cols { max_c } else { max_r };
            lists.push(rest[pos..pos + len].to_vec());
            pos += len;
        }
    } else {
        let mut body: Vec<(usize, &str)> = lines.iter().copied().enumerate().skip(2).map(|(i, l)| (i + 1, l)).collect();
        while body.last().is_some_and(|(_, l)| l.is_empty()) {
            body.pop();
        }
        if body.len() > cols + rows {
            return Err(err(body[cols + rows].0, format!("expected {} index lists", cols + rows)));
        }
        for (no, l) in &body {
            lists.push(numbers(l, *no, F)?.into_iter().map(|x| (*no, x)).collect());
        }
        lists.resize(cols + rows, Vec::new());
    }

    let mut from_cols = BitMatrix::zeros(rows, cols);
    let mut from_rows = BitMatrix::zeros(rows, cols);
    for (k, list) in lists.iter().enumerate() {
        for &(no, x) in list {
            if x == 0 {
                continue;
            }
            let (target, i, j, bound) = if k < cols {
                (&mut from_cols, x - 1, k, rows)
            } else {
                (&mut from_rows, k - cols, x - 1, cols)
            };
            if x > bound {
                return Err(err(no, format!("index {x} out of range 1..={bound}")));
            }
            if target.get(i, j) {
                return Err(err(no, format!("duplicate index {x}")));
            }
            target.set(i, j, true);
        }
    }
    if from_cols != from_rows {
        return Err(err(0, "column and row lists disagree".into()));
    }
    Ok(from_cols)
}

/// Writes `m` as a Matrix Market coordinate pattern, entries in row-major order.
pub fn write_mtx(m: &BitMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MTX_HEADER}");
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.count_ones());
    for i in 0..m.rows() {
        for j in m.row_support(i) {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
    }
    out
}

/// Reads a Matrix Market coordinate file. Pattern entries set a bit; integer
/// entries are taken mod 2. Repeated coordinates are an error.
pub fn read_mtx(text: &str) -> Result<BitMatrix> {
    const F: &str = "mtx";
    let err = |line: usize, message: String| Error::Format { format: F, line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
    let banner_lc = banner.to_ascii_lowercase();
    let fields: Vec<&str> = banner_lc.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(err(1, format!("unsupported banner {banner:?}")));
    }
    let pattern = match fields[3] {
        "pattern" => true,
        "integer" => false,
        other => return Err(err(1, format!("unsupported field {other:?}"))),
    };
    if fields[4] != "general" {
        return Err(err(1, format!("unsupported symmetry {:?}", fields[4])));
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (no, size) = body.next().ok_or_else(|| err(2, "missing size line".into()))?;
    let size: Vec<usize> = numbers(size, no, F)?;
    let [rows, cols, nnz] = size[..] else {
        return Err(err(no, "expected \"rows cols entries\"".into()));
    };
    let mut m = BitMatrix::zeros(rows, cols);
    let mut seen = 0usize;
    for (no, l) in body {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let want = if pattern { 2 } else { 3 };
        if toks.len() != want {
            return Err(err(no, format!("expected {want} fields")));
        }
        let ij = numbers(&toks[..2].join(" "), no, F)?;
        let (i, j) = (ij[0], ij[1]);
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(err(no, format!("entry ({i}, {j}) out of range")));
        }
        seen += 1;
        let bit = pattern
            || toks[2]
                .parse::<i64>()
                .map_err(|_| err(no, format!("bad value {:?}", toks[2])))?
                .rem_euclid(2)
                == 1;
        if m.get(i - 1, j - 1) {
            return Err(err(no, format!("duplicate entry ({i}, {j})")));
        }
        if bit {
            m.set(i - 1, j - 1, true);
        }
    }
    if seen != nnz {
        return Err(err(0, format!("size line declares {nnz} entries, found {seen}")));
    }
    Ok(m)
}
