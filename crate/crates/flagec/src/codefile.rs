//! Text formats for code definitions and logical-operator tables.
//!
//! A code file is line-oriented `key = value` text. Each side of the CSS
//! pair is given either as a check polynomial (ascending exponent list) or
//! as explicit parity-check rows of 0/1 strings, never both:
//!
//! ```text
//! # the [[7,1,3]] code
//! n = 7
//! check_poly_x = 0,2,3,4
//! check_poly_z = 0,2,3,4
//! logical_table = steane.logicals
//! name = steane
//! ```
//!
//! A logical table holds one operator per line in sparse Pauli form,
//! alternating X-type and Z-type representatives: line 2i−1 is X̄_i and
//! line 2i is Z̄_i. Blank lines and `#` comments are ignored in both
//! formats.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bits::{BitMatrix, Bits};
use crate::classical::ClassicalCode;
use crate::css::CssCode;
use crate::pauli::Pauli;
use crate::poly::BinaryPolynomial;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required key {key:?}")]
    MissingKey { key: &'static str },
    #[error("side {side}: give exactly one of check_poly_{side} or h{side}_row entries")]
    SideConflict { side: char },
    #[error("io error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("code construction failed: {0}")]
    Code(#[from] crate::classical::CodeError),
    #[error("CSS assembly failed: {0}")]
    Css(#[from] crate::css::CssError),
    #[error("logical table: {0}")]
    Logicals(String),
}

/// Largest code length the file parser accepts.
pub const MAX_CODE_LENGTH: usize = 4096;

fn parse_error(line: usize, message: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        message: message.into(),
    }
}

/// One side of the CSS pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideSpec {
    Polynomial(BinaryPolynomial),
    Rows(Vec<Bits>),
}

/// Parsed code-definition file.
#[derive(Debug, Clone)]
pub struct CodeSpecFile {
    pub n: usize,
    pub x_side: SideSpec,
    pub z_side: SideSpec,
    pub logical_table: Option<PathBuf>,
    pub name: Option<String>,
}

pub fn parse_code_file(text: &str) -> Result<CodeSpecFile, FileError> {
    let mut n: Option<usize> = None;
    let mut poly_x: Option<BinaryPolynomial> = None;
    let mut poly_z: Option<BinaryPolynomial> = None;
    let mut rows_x: Vec<Bits> = Vec::new();
    let mut rows_z: Vec<Bits> = Vec::new();
    let mut logical_table = None;
    let mut name = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_error(line_no, "expected key = value"))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n" => {
                let parsed = value
                    .parse::<usize>()
                    .map_err(|_| parse_error(line_no, format!("invalid n {value:?}")))?;
                if parsed == 0 || parsed > MAX_CODE_LENGTH {
                    return Err(parse_error(
                        line_no,
                        format!("n must be in 1..={MAX_CODE_LENGTH}"),
                    ));
                }
                n = Some(parsed);
            }
            "check_poly_x" => {
                let p = BinaryPolynomial::parse_exponent_list(value)
                    .map_err(|e| parse_error(line_no, e.to_string()))?;
                poly_x = Some(p);
            }
            "check_poly_z" => {
                let p = BinaryPolynomial::parse_exponent_list(value)
                    .map_err(|e| parse_error(line_no, e.to_string()))?;
                poly_z = Some(p);
            }
            "hx_row" => {
                rows_x.push(
                    Bits::from_bit_str(value).map_err(|e| parse_error(line_no, e.to_string()))?,
                );
            }
            "hz_row" => {
                rows_z.push(
                    Bits::from_bit_str(value).map_err(|e| parse_error(line_no, e.to_string()))?,
                );
            }
            "logical_table" => logical_table = Some(PathBuf::from(value)),
            "name" => name = Some(value.to_string()),
            other => return Err(parse_error(line_no, format!("unknown key {other:?}"))),
        }
    }

    let n = n.ok_or(FileError::MissingKey { key: "n" })?;
    let x_side = match (poly_x, rows_x.is_empty()) {
        (Some(p), true) => SideSpec::Polynomial(p),
        (None, false) => SideSpec::Rows(rows_x),
        _ => return Err(FileError::SideConflict { side: 'x' }),
    };
    let z_side = match (poly_z, rows_z.is_empty()) {
        (Some(p), true) => SideSpec::Polynomial(p),
        (None, false) => SideSpec::Rows(rows_z),
        _ => return Err(FileError::SideConflict { side: 'z' }),
    };
    for (side, spec) in [('x', &x_side), ('z', &z_side)] {
        if let SideSpec::Rows(rows) = spec {
            for row in rows {
                if row.len() != n {
                    return Err(parse_error(
                        0,
                        format!("h{side}_row has length {} but n = {n}", row.len()),
                    ));
                }
            }
        }
    }
    Ok(CodeSpecFile {
        n,
        x_side,
        z_side,
        logical_table,
        name,
    })
}

/// Parse a logical-operator table: pairs of sparse Pauli lines.
pub fn parse_logical_table(text: &str, n: usize) -> Result<Vec<(Pauli, Pauli)>, FileError> {
    let mut operators = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = Pauli::from_sparse_str(line, n).map_err(|e| parse_error(idx + 1, e.to_string()))?;
        if p.is_identity() {
            return Err(parse_error(idx + 1, "logical operator must be nontrivial"));
        }
        operators.push(p);
    }
    if operators.len() % 2 != 0 {
        return Err(FileError::Logicals(format!(
            "expected X/Z pairs, found {} operators",
            operators.len()
        )));
    }
    Ok(operators
        .chunks(2)
        .map(|pair| (pair[0].clone(), pair[1].clone()))
        .collect())
}

fn classical_from_side(spec: &SideSpec, n: usize) -> Result<ClassicalCode, FileError> {
    match spec {
        SideSpec::Polynomial(p) => Ok(ClassicalCode::from_check_polynomial(p, n)?),
        SideSpec::Rows(rows) => Ok(ClassicalCode::from_check_matrix(BitMatrix::from_rows(
            rows.clone(),
            n,
        ))?),
    }
}

/// Build the classical pair a spec file describes.
pub fn classical_pair(spec: &CodeSpecFile) -> Result<(ClassicalCode, ClassicalCode), FileError> {
    Ok((
        classical_from_side(&spec.x_side, spec.n)?,
        classical_from_side(&spec.z_side, spec.n)?,
    ))
}

/// Build the CSS code a spec file describes. Logical operators come from
/// the referenced table when present (validated), or are derived.
pub fn build_from_spec(spec: &CodeSpecFile, base_dir: &Path) -> Result<CssCode, FileError> {
    let (cx, cz) = classical_pair(spec)?;
    let mut code = CssCode::build(&cx, &cz)?;
    match &spec.logical_table {
        Some(rel) => {
            let path = base_dir.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|source| FileError::Io {
                path: path.clone(),
                source,
            })?;
            let table = parse_logical_table(&text, spec.n)?;
            code.set_logicals(table)?;
        }
        None => {
            let derived = code.derive_logicals();
            code.set_logicals(derived)?;
        }
    }
    if let Some(name) = &spec.name {
        code.set_label(name.clone());
    }
    Ok(code)
}

/// Read and build a code from a file path.
pub fn load_code(path: &Path) -> Result<CssCode, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let spec = parse_code_file(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    build_from_spec(&spec, base)
}
