//! Deterministic file emission: CSV tables with a fixed column order and
//! JSON summaries, both with floats at 17 significant digits so doubles
//! round-trip exactly and identical runs produce identical bytes.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::config::fmt_float;
use crate::error::CliError;

/// serde_json formatter printing every float as `{:.16e}`.
#[derive(Clone, Copy, Default)]
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes with the fixed-precision formatter and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    value
        .serialize(&mut serializer)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// A CSV table with a header row. Cells are preformatted strings.
pub struct CsvTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn cell_f(x: f64) -> String {
    fmt_float(x)
}

pub fn cell_u(x: u64) -> String {
    x.to_string()
}

pub fn cell_opt_f(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|err| CliError::Runtime(format!("cannot create {}: {err}", path.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|err| CliError::Runtime(format!("cannot write {}: {err}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        #[derive(Serialize)]
        struct Sample {
            x: f64,
        }
        let text = to_json_string(&Sample { x: 0.5 });
        assert_eq!(text, "{\"x\":5.0000000000000000e-1}\n");
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap().to_bits(), 0.5f64.to_bits());
    }

    #[test]
    fn awkward_floats_round_trip() {
        #[derive(Serialize)]
        struct Sample {
            x: f64,
        }
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, -0.0, 12345.6789] {
            let text = to_json_string(&Sample { x });
            let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(
                parsed["x"].as_f64().unwrap().to_bits(),
                x.to_bits(),
                "round trip failed for {x}"
            );
        }
    }

    #[test]
    fn csv_rows_join_with_commas_and_newlines() {
        let mut table = CsvTable::new(vec!["a", "b"]);
        table.push(vec![cell_u(1), cell_f(0.5)]);
        assert_eq!(table.render(), "a,b\n1,5.0000000000000000e-1\n");
    }
}
