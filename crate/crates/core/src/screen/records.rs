//! CSV ingestion of number-field records.
//!
//! Header `label,degree,disc,poly,h,h_plus` (any column order). `poly` lists
//! coefficients low to high separated by `;`; `h` and `h_plus` may be empty.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::resultant;
use crate::poly::IntPoly;

pub const COLUMNS: [&str; 6] = ["label", "degree", "disc", "poly", "h", "h_plus"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldRecord {
    pub label: String,
    pub degree: usize,
    #[serde(serialize_with = "crate::serde_big::int::serialize")]
    pub disc: BigInt,
    pub poly: IntPoly,
    pub h: Option<u64>,
    pub h_plus: Option<u64>,
}

impl FieldRecord {
    /// Validated record; the error names the violated invariant.
    pub fn new(
        label: &str,
        disc: BigInt,
        poly: IntPoly,
        h: Option<u64>,
        h_plus: Option<u64>,
    ) -> Result<Self, String> {
        let degree = poly.degree().unwrap_or(0);
        if degree < 2 {
            return Err("degree below 2".into());
        }
        if !poly.is_monic() {
            return Err("polynomial not monic".into());
        }
        if resultant(&poly, &poly.derivative()).map_or(true, |r| r.is_zero()) {
            return Err("polynomial not squarefree".into());
        }
        Ok(FieldRecord { label: label.to_string(), degree, disc, poly, h, h_plus })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordsError {
    #[error("missing column {0:?} in header")]
    MissingColumn(&'static str),
    #[error("unreadable CSV: {0}")]
    Csv(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedRecords {
    pub records: Vec<FieldRecord>,
    /// One message per skipped row.
    pub warnings: Vec<String>,
}

pub fn parse_field_records(text: &str) -> Result<ParsedRecords, RecordsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| RecordsError::Csv(e.to_string()))?.clone();
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h == name)
            .ok_or(RecordsError::MissingColumn(name))?;
    }
    let mut out = ParsedRecords::default();
    let mut seen = BTreeSet::new();
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                out.warnings.push(format!("row {line}: {e}"));
                continue;
            }
        };
        let get = |i: usize| rec.get(idx[i]).unwrap_or("");
        match parse_row(get(0), get(1), get(2), get(3), get(4), get(5)) {
            Ok(r) if !seen.insert(r.label.clone()) => {
                out.warnings.push(format!("row {line}: duplicate label {}", r.label));
            }
            Ok(r) => out.records.push(r),
            Err(e) => out.warnings.push(format!("row {line}: {e}")),
        }
    }
    Ok(out)
}

fn parse_row(
    label: &str,
    degree: &str,
    disc: &str,
    poly: &str,
    h: &str,
    h_plus: &str,
) -> Result<FieldRecord, String> {
    if label.is_empty() {
        return Err("empty label".into());
    }
    let degree: usize = degree.parse().map_err(|_| format!("bad degree {degree:?}"))?;
    let disc: BigInt = disc.parse().map_err(|_| format!("bad disc {disc:?}"))?;
    let poly = IntPoly::parse_list(poly, ';').ok_or_else(|| format!("bad poly {poly:?}"))?;
    let opt = |s: &str, what: &str| -> Result<Option<u64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| format!("bad {what} {s:?}"))
        }
    };
    let rec = FieldRecord::new(label, disc, poly, opt(h, "h")?, opt(h_plus, "h_plus")?)?;
    if rec.degree != degree {
        return Err(format!("degree {degree} differs from polynomial degree {}", rec.degree));
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_skips() {
        let text = "label,degree,disc,poly,h,h_plus\n\
                    q3,2,-3,1;1;1,1,1\n\
                    bad,2,5,1;0;2,1,1\n\
                    short,3,5,1;0;1,1,1\n\
                    rep,2,-16,1;2;1,1,1\n\
                    q3,2,-3,1;1;1,1,1\n\
                    x,2,8,-2;0;1,1,\n\
                    junk,two,8,-2;0;1,1,1\n";
        let p = parse_field_records(text).unwrap();
        let labels: Vec<&str> = p.records.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["q3", "x"]);
        assert_eq!(p.warnings.len(), 5);
        assert_eq!(p.records[1].h_plus, None);
        assert_eq!(p.records[1].h, Some(1));
    }

    #[test]
    fn column_order_free() {
        let text = "h_plus,h,poly,disc,degree,label\n1,1,1;1;1,-3,2,q3\n";
        let p = parse_field_records(text).unwrap();
        assert_eq!(p.records[0].poly, IntPoly::from_i64(&[1, 1, 1]));
    }

    #[test]
    fn missing_column() {
        assert_eq!(
            parse_field_records("label,degree,disc,poly,h\n"),
            Err(RecordsError::MissingColumn("h_plus"))
        );
    }

    #[test]
    fn bundled_corpus_is_clean() {
        let p = parse_field_records(include_str!("../../data/fields_sample.csv")).unwrap();
        assert!(p.warnings.is_empty(), "{:?}", p.warnings);
        assert!(p.records.len() >= 30);
    }
}
