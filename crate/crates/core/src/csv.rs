//! Strict numeric CSV ingestion: rectangular, decimal point `.`, UTF-8,
//! rows = observations. Errors carry 1-based line and column coordinates.

use crate::error::{Error, Result};
use crate::matrix::SampleMatrix;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// Reads a dataset from a CSV file.
pub fn parse_csv(path: &Path, has_header: bool) -> Result<SampleMatrix> {
    let file = File::open(path)?;
    parse_csv_reader(BufReader::new(file), has_header)
}

/// Reads a dataset from any buffered reader (same contract as [`parse_csv`]).
pub fn parse_csv_reader<R: BufRead>(reader: R, has_header: bool) -> Result<SampleMatrix> {
    let mut data: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if idx == 0 && has_header {
            continue;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                column: 0,
                message: "empty row".to_string(),
            });
        }
        let mut count = 0usize;
        for (col, cell) in trimmed.split(',').enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                column: col + 1,
                message: format!("cannot parse {cell:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    column: col + 1,
                    message: format!("non-finite value {v}"),
                });
            }
            data.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(Error::Parse {
                    line: line_no,
                    column: 0,
                    message: format!("ragged row: expected {w} fields, got {count}"),
                });
            }
            _ => {}
        }
        rows += 1;
    }
    let width = width.ok_or_else(|| Error::config("CSV contains no data rows".to_string()))?;
    SampleMatrix::new(data, rows, width)
}

/// Reads a single-row CSV as a plain vector (used for reference means).
pub fn parse_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let m = parse_csv(path, false)?;
    if m.rows() != 1 {
        return Err(Error::config(format!(
            "expected a single-row vector file, got {} rows",
            m.rows()
        )));
    }
    Ok(m.row(0).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn parses_a_rectangular_file() {
        let m = parse_csv_reader(Cursor::new("1,2\n3,4\n5,6\n"), false).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 2));
        assert_eq!(m.row(2), &[5.0, 6.0]);
    }

    #[test]
    fn skips_the_header_when_asked() {
        let m = parse_csv_reader(Cursor::new("a,b\n1,2\n3,4\n5,6\n"), true).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 2));
        // Without the flag the header is a parse error on line 1.
        let err = parse_csv_reader(Cursor::new("a,b\n1,2\n"), false).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 1)),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn names_the_bad_cell() {
        let err = parse_csv_reader(Cursor::new("1,2\n1,x\n"), false).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 2)),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rejects_ragged_and_empty_input() {
        let err = parse_csv_reader(Cursor::new("1,2\n3\n"), false).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        assert!(parse_csv_reader(Cursor::new(""), false).is_err());
        assert!(parse_csv_reader(Cursor::new("h1,h2\n"), true).is_err());
        let err = parse_csv_reader(Cursor::new("1,inf\n"), false).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 2)),
            other => panic!("unexpected error {other}"),
        }
    }
}
