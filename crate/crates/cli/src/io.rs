//! Plain CSV matrices (one row per line) and vectors (one value per line).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use normprod_core::{DenseMatrix, DenseVector};

use crate::CliError;

/// Round-trip float formatting: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_rows(path: &Path, text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(j, field)| {
                let field = field.trim();
                field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    CliError::Io(format!(
                        "{}: line {}, column {}: '{field}' is not a finite number",
                        path.display(),
                        i + 1,
                        j + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        if let Some(first) = rows.first().map(|r: &Vec<f64>| r.len()) {
            if row.len() != first {
                return Err(CliError::Io(format!(
                    "{}: line {}: expected {first} columns, found {}",
                    path.display(),
                    i + 1,
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Io(format!("{}: no data", path.display())));
    }
    Ok(rows)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let rows = parse_rows(path, &read(path)?)?;
    DenseMatrix::from_rows(&rows).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_vector(path: &Path) -> Result<DenseVector, CliError> {
    let rows = parse_rows(path, &read(path)?)?;
    if rows[0].len() != 1 {
        return Err(CliError::Io(format!("{}: expected a single column, found {}", path.display(), rows[0].len())));
    }
    DenseVector::new(rows.into_iter().map(|r| r[0]).collect())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn matrix_csv(m: &DenseMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

pub fn vector_csv(v: &DenseVector) -> String {
    v.iter().map(|&x| fmt_f64(x) + "\n").collect()
}

pub fn write(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(content.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = parse_rows(Path::new("a.csv"), "1,2\n3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_rows(Path::new("a.csv"), "1,2\n3,x\n").unwrap_err();
        assert!(err.to_string().contains("line 2, column 2"), "{err}");
    }

    #[test]
    fn matrix_text_round_trips() {
        let m = DenseMatrix::from_rows(&[vec![1.5, -2.0], vec![1e-17, 3.0]]).unwrap();
        let rows = parse_rows(Path::new("m"), &matrix_csv(&m)).unwrap();
        assert_eq!(DenseMatrix::from_rows(&rows).unwrap(), m);
    }
}
