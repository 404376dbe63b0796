//! CSV emission: comma separated, `.` decimal, 17 significant digits in
//! scientific notation, LF line endings, one header row.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// `x` with 17 significant digits; non-finite values are an error.
pub fn format_number(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Numerical {
            message: "non-finite value reached CSV output".to_string(),
            achieved: x,
        });
    }
    Ok(format!("{x:.16e}"))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Config(format!(
                "row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render(&self) -> Result<String> {
        for h in &self.header {
            check_text(h)?;
        }
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(x) => out.push_str(&format_number(*x)?),
                    Cell::Int(n) => write!(out, "{n}").expect("writing to a String"),
                    Cell::Text(s) => {
                        check_text(s)?;
                        out.push_str(s);
                    }
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let text = self.render()?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn check_text(s: &str) -> Result<()> {
    if s.contains([',', '\n', '\r', '"']) {
        return Err(Error::Config(format!("CSV text cell {s:?} needs quoting")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(1e-4).unwrap(), "1.0000000000000000e-4");
        assert_eq!(format_number(-2.5).unwrap(), "-2.5000000000000000e0");
        assert!(format_number(f64::NAN).is_err());
        assert!(format_number(f64::INFINITY).is_err());
        let x = 0.1 + 0.2;
        assert_eq!(format_number(x).unwrap().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn render_table() {
        let mut t = CsvTable::new(["x", "n", "name"]);
        t.push(vec![1.0.into(), 3usize.into(), "a".into()]).unwrap();
        assert!(t.push(vec![1.0.into()]).is_err());
        assert_eq!(t.render().unwrap(), "x,n,name\n1.0000000000000000e0,3,a\n");
        t.push(vec![f64::NAN.into(), 0usize.into(), "b".into()])
            .unwrap();
        assert!(t.render().is_err());
    }
}
