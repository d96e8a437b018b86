//! Matrix Market reading and writing for dense complex matrices.
//!
//! Both `array` and `coordinate` layouts are accepted with `real`, `integer`,
//! `complex` or `pattern` fields. Symmetric, skew-symmetric and Hermitian
//! files store one triangle and are expanded to the full matrix.

use std::fmt::Write as _;
use std::path::Path;

use eigopt::linalg::CMatrix;
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

impl Symmetry {
    fn mirror(self, z: Complex64) -> Complex64 {
        match self {
            Symmetry::General | Symmetry::Symmetric => z,
            Symmetry::SkewSymmetric => -z,
            Symmetry::Hermitian => z.conj(),
        }
    }
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(&text, &path.display().to_string())
}

/// Parses Matrix Market `text`; `name` labels error messages.
pub fn parse_matrix(text: &str, name: &str) -> Result<CMatrix, CliError> {
    let err = |line: usize, msg: String| CliError::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(
            hline,
            format!("expected `%%MatrixMarket matrix <layout> <field> <symmetry>`, got `{header}`"),
        ));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(err(hline, format!("unknown layout `{other}`"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(err(hline, format!("unknown field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(err(hline, format!("unknown symmetry `{other}`"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(err(hline, "pattern field requires coordinate layout".into()));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(err(hline, "hermitian symmetry requires complex field".into()));
    }

    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = data.next().ok_or_else(|| err(hline, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| err(sline, format!("bad size line `{size}`: {e}")))?;
    let want = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(err(sline, format!("size line needs {want} integers, got `{size}`")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(
            sline,
            format!("{} matrix must be square, got {rows}x{cols}", words[4]),
        ));
    }

    let parse_value = |line: usize, toks: &[&str]| -> Result<Complex64, CliError> {
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|e| err(line, format!("bad number `{t}`: {e}")))
        };
        let need = match field {
            Field::Pattern => 0,
            Field::Complex => 2,
            _ => 1,
        };
        if toks.len() != need {
            return Err(err(line, format!("expected {need} value token(s), got {}", toks.len())));
        }
        Ok(match field {
            Field::Pattern => Complex64::new(1.0, 0.0),
            Field::Complex => Complex64::new(num(toks[0])?, num(toks[1])?),
            Field::Integer => {
                let v = toks[0]
                    .parse::<i64>()
                    .map_err(|e| err(line, format!("bad integer `{}`: {e}", toks[0])))?;
                Complex64::new(v as f64, 0.0)
            }
            Field::Real => Complex64::new(num(toks[0])?, 0.0),
        })
    };

    let mut m = CMatrix::zeros(rows, cols);
    let mut set = |i: usize, j: usize, z: Complex64, line: usize| -> Result<(), CliError> {
        if i == j && symmetry == Symmetry::SkewSymmetric && z != Complex64::new(0.0, 0.0) {
            return Err(err(line, "skew-symmetric matrix has a nonzero diagonal entry".into()));
        }
        if symmetry != Symmetry::General && j > i {
            return Err(err(
                line,
                format!("entry ({}, {}) lies above the diagonal", i + 1, j + 1),
            ));
        }
        m[(i, j)] += z;
        if symmetry != Symmetry::General && i != j {
            m[(j, i)] += symmetry.mirror(z);
        }
        Ok(())
    };

    match layout {
        Layout::Array => {
            // column-major; symmetric variants list the lower triangle only
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .filter(|&(i, j)| match symmetry {
                    Symmetry::General => true,
                    Symmetry::SkewSymmetric => i > j,
                    _ => i >= j,
                })
                .collect();
            let mut last = sline;
            for &(i, j) in &positions {
                let (line, l) = data
                    .next()
                    .ok_or_else(|| err(last, format!("expected {} entries, file ends early", positions.len())))?;
                last = line;
                let toks: Vec<&str> = l.split_whitespace().collect();
                set(i, j, parse_value(line, &toks)?, line)?;
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut last = sline;
            for _ in 0..nnz {
                let (line, l) = data
                    .next()
                    .ok_or_else(|| err(last, format!("expected {nnz} entries, file ends early")))?;
                last = line;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() < 2 {
                    return Err(err(line, format!("entry line `{l}` lacks indices")));
                }
                let index = |t: &str, bound: usize| -> Result<usize, CliError> {
                    match t.parse::<usize>() {
                        Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
                        _ => Err(err(line, format!("index `{t}` outside 1..={bound}"))),
                    }
                };
                let (i, j) = (index(toks[0], rows)?, index(toks[1], cols)?);
                set(i, j, parse_value(line, &toks[2..])?, line)?;
            }
        }
    }
    if let Some((line, l)) = data.next() {
        return Err(err(line, format!("unexpected trailing data `{l}`")));
    }
    Ok(m)
}

/// Array-format text with full precision; real field when every entry is real.
pub fn format_matrix(m: &CMatrix) -> String {
    let real = m.iter().all(|z| z.im == 0.0);
    let mut s = format!(
        "%%MatrixMarket matrix array {} general\n{} {}\n",
        if real { "real" } else { "complex" },
        m.nrows(),
        m.ncols()
    );
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if real {
                let _ = writeln!(s, "{:.16e}", z.re);
            } else {
                let _ = writeln!(s, "{:.16e} {:.16e}", z.re, z.im);
            }
        }
    }
    s
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<(), CliError> {
    std::fs::write(path, format_matrix(m)).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
