//! CSV helpers. Floats are written with 17 significant digits.

use std::fmt::Write as _;

/// `{:.16e}` formatting, which round-trips any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv {
            buf,
            columns: header.len(),
        }
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    /// Append one row of pre-formatted cells.
    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.columns);
        let mut first = true;
        for c in cells {
            if !first {
                self.buf.push(',');
            }
            first = false;
            let _ = write!(self.buf, "{}", c.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn row_f64(&mut self, cells: &[f64]) {
        let cells: Vec<String> = cells.iter().map(|&v| fmt_f64(v)).collect();
        self.row(&cells);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
