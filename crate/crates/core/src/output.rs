//! CSV and JSON writers with a fixed, reproducible text format: LF line
//! endings, a header row, and floats printed with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Shortest format that round-trips every `f64`: 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvOutput {
    writer: csv::Writer<BufWriter<File>>,
    columns: usize,
}

impl CsvOutput {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = File::create(path)?;
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        Ok(CsvOutput {
            writer,
            columns: header.len(),
        })
    }

    pub fn write_floats(&mut self, values: &[f64]) -> Result<()> {
        debug_assert_eq!(values.len(), self.columns);
        self.writer.write_record(values.iter().map(|&v| format_float(v)))?;
        Ok(())
    }

    /// Writes pre-formatted fields, for rows that mix numbers and labels.
    pub fn write_fields<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1.1557e-6, f64::MAX] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let mut out = CsvOutput::create(&path, &["t", "x"]).unwrap();
        out.write_floats(&[0.0, 1.5]).unwrap();
        out.write_fields(&["1", "label"]).unwrap();
        out.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "t,x\n0.0000000000000000e0,1.5000000000000000e0\n1,label\n"
        );
    }
}
