//! Tabular output: header row, units row, data rows, as CSV.

use std::io::Write;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub units: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    /// `columns` pairs each column name with its unit.
    pub fn new(columns: &[(&str, &str)]) -> Self {
        ResultTable {
            columns: columns.iter().map(|c| c.0.to_string()).collect(),
            units: columns.iter().map(|c| c.1.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        w.write_record(&self.units)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// Fixed-point rendering with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return "NaN".into();
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let decimals = |v: f64| (digits as i32 - 1 - v.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(x);
    let s = format!("{:.*}", d, x);
    // rounding may carry into a new leading digit (9.9996 -> 10.000)
    let rounded: f64 = s.parse().unwrap_or(x);
    let d2 = decimals(rounded);
    if d2 < d {
        format!("{:.*}", d2, rounded)
    } else {
        s
    }
}

/// Rate in Mbps, four significant digits.
pub fn mbps(bps: f64) -> String {
    sig(bps / 1e6, 4)
}

pub fn plain(x: f64) -> String {
    format!("{x}")
}
