//! Scan-table CSV codec.
//!
//! Fixed schema, comma-separated, UTF-8, LF line endings. Floats are printed
//! with Rust's shortest round-trip representation, so parsing an emitted
//! table reproduces the in-memory rows bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One scan point: the scanned value, measured angular momenta before/after,
/// their changes, the closed-form predictions, and the energy ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub value: f64,
    pub w_lz_in: f64,
    pub w_sz_in: f64,
    pub w_lz_out: f64,
    pub w_sz_out: f64,
    pub delta_w_lz: f64,
    pub delta_w_sz: f64,
    /// Always `delta_w_lz + delta_w_sz`.
    pub delta_w_jz: f64,
    pub closed_d_w_lz: f64,
    pub closed_d_w_sz: f64,
    pub energy_ratio: f64,
}

pub const SCAN_CSV_HEADER: &str = "value,w_lz_in,w_sz_in,w_lz_out,w_sz_out,delta_w_lz,delta_w_sz,delta_w_jz,closed_d_w_lz,closed_d_w_sz,energy_ratio";

const COLUMNS: usize = 11;

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("missing header line")]
    MissingHeader,
    #[error("unexpected header: {0}")]
    BadHeader(String),
    #[error("line {line}: expected {COLUMNS} fields, got {got}")]
    BadFieldCount { line: usize, got: usize },
    #[error("line {line}, field '{field}': not a float: {text}")]
    BadFloat {
        line: usize,
        field: &'static str,
        text: String,
    },
}

impl ScanRow {
    fn fields(&self) -> [f64; COLUMNS] {
        [
            self.value,
            self.w_lz_in,
            self.w_sz_in,
            self.w_lz_out,
            self.w_sz_out,
            self.delta_w_lz,
            self.delta_w_sz,
            self.delta_w_jz,
            self.closed_d_w_lz,
            self.closed_d_w_sz,
            self.energy_ratio,
        ]
    }

    fn from_fields(f: [f64; COLUMNS]) -> ScanRow {
        ScanRow {
            value: f[0],
            w_lz_in: f[1],
            w_sz_in: f[2],
            w_lz_out: f[3],
            w_sz_out: f[4],
            delta_w_lz: f[5],
            delta_w_sz: f[6],
            delta_w_jz: f[7],
            closed_d_w_lz: f[8],
            closed_d_w_sz: f[9],
            energy_ratio: f[10],
        }
    }
}

const FIELD_NAMES: [&str; COLUMNS] = [
    "value",
    "w_lz_in",
    "w_sz_in",
    "w_lz_out",
    "w_sz_out",
    "delta_w_lz",
    "delta_w_sz",
    "delta_w_jz",
    "closed_d_w_lz",
    "closed_d_w_sz",
    "energy_ratio",
];

pub fn write_scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SCAN_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let fields = row.fields();
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            // shortest round-trip float formatting
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_scan_csv(text: &str) -> Result<Vec<ScanRow>, CsvError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(CsvError::MissingHeader)?;
    if header.trim_end() != SCAN_CSV_HEADER {
        return Err(CsvError::BadHeader(header.to_string()));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 2;
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != COLUMNS {
            return Err(CsvError::BadFieldCount {
                line: line_no,
                got: parts.len(),
            });
        }
        let mut fields = [0.0; COLUMNS];
        for (k, part) in parts.iter().enumerate() {
            fields[k] = part.parse::<f64>().map_err(|_| CsvError::BadFloat {
                line: line_no,
                field: FIELD_NAMES[k],
                text: part.to_string(),
            })?;
        }
        rows.push(ScanRow::from_fields(fields));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits_equal(a: &ScanRow, b: &ScanRow) -> bool {
        a.fields()
            .iter()
            .zip(b.fields().iter())
            .all(|(x, y)| x.to_bits() == y.to_bits())
    }

    #[test]
    fn header_and_layout_are_stable() {
        let rows = vec![ScanRow {
            value: 2.5,
            w_lz_in: 0.0,
            w_sz_in: 1.0,
            w_lz_out: 2.0,
            w_sz_out: -1.0,
            delta_w_lz: 2.0,
            delta_w_sz: -2.0,
            delta_w_jz: 0.0,
            closed_d_w_lz: 0.315,
            closed_d_w_sz: -0.315,
            energy_ratio: 0.992,
        }];
        let text = write_scan_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SCAN_CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "2.5,0,1,2,-1,2,-2,0,0.315,-0.315,0.992"
        );
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!(parse_scan_csv(""), Err(CsvError::MissingHeader));
        assert!(matches!(
            parse_scan_csv("wrong,header\n"),
            Err(CsvError::BadHeader(_))
        ));
        let short = format!("{SCAN_CSV_HEADER}\n1,2,3\n");
        assert!(matches!(
            parse_scan_csv(&short),
            Err(CsvError::BadFieldCount { line: 2, got: 3 })
        ));
        let bad = format!("{SCAN_CSV_HEADER}\n1,2,3,4,5,6,7,8,9,ten,11\n");
        assert!(matches!(
            parse_scan_csv(&bad),
            Err(CsvError::BadFloat { field: "closed_d_w_sz", .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn roundtrip_is_bit_exact(raw in proptest::collection::vec(
            proptest::array::uniform11(proptest::num::f64::ANY), 0..8,
        )) {
            let rows: Vec<ScanRow> = raw.into_iter().map(ScanRow::from_fields).collect();
            let text = write_scan_csv(&rows);
            let back = parse_scan_csv(&text).unwrap();
            prop_assert_eq!(rows.len(), back.len());
            for (a, b) in rows.iter().zip(back.iter()) {
                prop_assert!(bits_equal(a, b), "{:?} vs {:?}", a, b);
            }
        }
    }
}
