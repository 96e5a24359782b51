use std::path::Path;

use super::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse a Matrix Market `coordinate` file with a real (or integer) field and
/// general or symmetric storage.
///
/// Symmetric files are expanded to full storage, indices are converted to
/// zero-based and duplicate entries are summed.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(hline, "missing `%%MatrixMarket` banner"));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(
            hline,
            format!("unsupported object `{}`", tokens[1]),
        ));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(
            hline,
            format!("unsupported format `{}`", tokens[2]),
        ));
    }
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(parse_err(hline, format!("unsupported field `{other}`"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(hline, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut n = 0;
    for (lno, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(lno, "size line must hold `rows cols nnz`"));
        }
        let nums: std::result::Result<Vec<usize>, _> = parts.iter().map(|p| p.parse()).collect();
        let nums = nums.map_err(|e| parse_err(lno, format!("bad size line: {e}")))?;
        if nums[0] != nums[1] {
            return Err(parse_err(
                lno,
                format!("matrix is not square ({}x{})", nums[0], nums[1]),
            ));
        }
        n = nums[0];
        size = Some((lno, nums[2]));
        triplets.reserve(if symmetry == Symmetry::Symmetric {
            2 * nums[2]
        } else {
            nums[2]
        });
        break;
    }
    let (size_line, nnz) = size.ok_or_else(|| parse_err(hline, "missing size line"))?;

    let mut seen = 0usize;
    let mut last_line = size_line;
    for (lno, raw) in lines {
        last_line = lno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(lno, "entry must hold `row col value`"));
        }
        let r: usize = parts[0]
            .parse()
            .map_err(|e| parse_err(lno, format!("bad row index: {e}")))?;
        let c: usize = parts[1]
            .parse()
            .map_err(|e| parse_err(lno, format!("bad column index: {e}")))?;
        let v: f64 = parts[2]
            .parse()
            .map_err(|e| parse_err(lno, format!("bad value: {e}")))?;
        if r == 0 || c == 0 || r > n || c > n {
            return Err(parse_err(
                lno,
                format!("index ({r}, {c}) out of bounds for n = {n}"),
            ));
        }
        if seen == nnz {
            return Err(parse_err(
                lno,
                format!("more than the declared {nnz} entries"),
            ));
        }
        seen += 1;
        triplets.push((r - 1, c - 1, v));
        if symmetry == Symmetry::Symmetric {
            if c > r {
                return Err(parse_err(
                    lno,
                    "symmetric file has an entry above the diagonal",
                ));
            }
            if r != c {
                triplets.push((c - 1, r - 1, v));
            }
        }
    }
    if seen != nnz {
        return Err(parse_err(
            last_line,
            format!("expected {nnz} entries, found {seen}"),
        ));
    }
    SparseMatrix::from_triplets(n, &triplets)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_market(&text)
}
