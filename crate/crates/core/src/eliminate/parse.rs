//! Line-oriented eigenform tables.
//!
//! ```text
//! # comment
//! field d=7 level lambda^3
//! form f1 qf -2,0,1
//! ap 1,-1 = 0,1
//! ap 0,-1 = 3/1,0
//! ```
//!
//! `qf` lists the defining polynomial of the eigenvalue field low degree
//! first; each `ap` row names a prime by a generator in `x,y` coordinates and
//! gives the eigenvalue over the power basis, with rationals as `num/den`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::qf::{CoefficientField, Irreducibility};
use super::EigenformRecord;
use crate::poly::IntPoly;
use crate::ring::{PrimeIdeal, QuadraticField};

const HASSE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported field d={0}")]
    UnsupportedField(u32),
    #[error("level lambda^{0} outside 1..=3")]
    BadLevel(u32),
    #[error("`form` before any `field` header")]
    FormBeforeHeader,
    #[error("`ap` row before any `form`")]
    RowBeforeForm,
    #[error("duplicate form {0:?} at this field and level")]
    DuplicateForm(String),
    #[error("defining polynomial {0} is constant or zero")]
    ConstantPolynomial(String),
    #[error("defining polynomial {0} is reducible over Q")]
    Reducible(String),
    #[error("{0} does not generate a prime ideal")]
    NotPrime(String),
    #[error("eigenvalue given at lambda")]
    AtLambda,
    #[error("second eigenvalue for prime {0}")]
    DuplicatePrime(String),
    #[error("{given} coordinates given but Q_f has degree {degree}")]
    TooManyCoordinates { given: usize, degree: usize },
    #[error("Hasse bound violated at prime {prime} (norm {norm}): |embedding| = {value:.6}")]
    HasseViolation { prime: String, norm: u64, value: f64 },
}

/// Result of parsing an eigenform file.
#[derive(Clone, Debug, Default)]
pub struct FormsFile {
    pub records: Vec<EigenformRecord>,
    /// `(d, level exponent)` pairs announced by a header, even with no forms.
    pub sections: BTreeSet<(u32, u32)>,
    pub warnings: Vec<String>,
}

impl fmt::Display for FormsFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} forms in {} sections", self.records.len(), self.sections.len())
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let int = |t: &str| -> Option<BigInt> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        BigInt::from_str(t).ok()
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(int(n)?, d))
        }
        None => Some(BigRational::from_integer(int(s)?)),
    }
}

struct Header {
    field: QuadraticField,
    level: u32,
}

fn parse_header(rest: &str, line: usize) -> Result<Header, ParseError> {
    let mut toks = rest.split_whitespace();
    let (Some(dtok), Some("level"), Some(ltok), None) =
        (toks.next(), toks.next(), toks.next(), toks.next())
    else {
        return Err(syntax(line, "expected `field d=<d> level lambda^<e>`"));
    };
    let d: u32 = dtok
        .strip_prefix("d=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| syntax(line, format!("bad field token {dtok:?}")))?;
    let level: u32 = ltok
        .strip_prefix("lambda^")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| syntax(line, format!("bad level token {ltok:?}")))?;
    let field = QuadraticField::new(d).map_err(|_| err(line, ParseErrorKind::UnsupportedField(d)))?;
    if !(1..=3).contains(&level) {
        return Err(err(line, ParseErrorKind::BadLevel(level)));
    }
    Ok(Header { field, level })
}

/// Parses and validates an eigenform file.
pub fn parse_forms(input: &str) -> Result<FormsFile, ParseError> {
    let mut out = FormsFile::default();
    let mut header: Option<Header> = None;
    let mut current: Option<EigenformRecord> = None;
    let mut seen: BTreeSet<(u32, u32, String)> = BTreeSet::new();

    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (keyword, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        match keyword {
            "field" => {
                out.records.extend(current.take());
                let h = parse_header(rest, line)?;
                out.sections.insert((h.field.d(), h.level));
                header = Some(h);
            }
            "form" => {
                let h = header.as_ref().ok_or_else(|| err(line, ParseErrorKind::FormBeforeHeader))?;
                out.records.extend(current.take());
                let mut toks = rest.split_whitespace();
                let (Some(id), Some("qf"), Some(coeffs), None) =
                    (toks.next(), toks.next(), toks.next(), toks.next())
                else {
                    return Err(syntax(line, "expected `form <id> qf <c0,c1,...>`"));
                };
                let poly = IntPoly::parse_list(coeffs, ',')
                    .ok_or_else(|| syntax(line, format!("bad polynomial {coeffs:?}")))?;
                let qf = CoefficientField::new(poly.clone())
                    .ok_or_else(|| err(line, ParseErrorKind::ConstantPolynomial(coeffs.into())))?;
                match qf.irreducibility() {
                    Irreducibility::Reducible => {
                        return Err(err(line, ParseErrorKind::Reducible(poly.to_string())))
                    }
                    Irreducibility::Unchecked => out.warnings.push(format!(
                        "line {line}: irreducibility of {poly} not checked (degree {})",
                        qf.degree()
                    )),
                    Irreducibility::Irreducible => {}
                }
                if !seen.insert((h.field.d(), h.level, id.to_string())) {
                    return Err(err(line, ParseErrorKind::DuplicateForm(id.to_string())));
                }
                current = Some(EigenformRecord {
                    field: h.field,
                    level_exponent: h.level,
                    form_id: id.to_string(),
                    qf,
                    eigenvalues: BTreeMap::new(),
                });
            }
            "ap" => {
                let rec = current.as_mut().ok_or_else(|| err(line, ParseErrorKind::RowBeforeForm))?;
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax(line, "expected `ap <x>,<y> = <r0,...>`"))?;
                let (lhs, rhs) = (lhs.trim(), rhs.trim());
                let gen = rec
                    .field
                    .parse_element(lhs)
                    .map_err(|_| syntax(line, format!("bad prime generator {lhs:?}")))?;
                let q = PrimeIdeal::from_generator(&gen)
                    .ok_or_else(|| err(line, ParseErrorKind::NotPrime(lhs.to_string())))?;
                if q.is_lambda() {
                    return Err(err(line, ParseErrorKind::AtLambda));
                }
                let coords = rhs
                    .split(',')
                    .map(|t| parse_rational(t.trim()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| syntax(line, format!("bad eigenvalue {rhs:?}")))?;
                let given = coords.len();
                let value = rec.qf.element(coords).ok_or_else(|| {
                    err(line, ParseErrorKind::TooManyCoordinates { given, degree: rec.qf.degree() })
                })?;
                let bound = 2.0 * (q.norm as f64).sqrt() + HASSE_TOLERANCE;
                if let Some(worst) = rec
                    .qf
                    .embeddings(&value)
                    .iter()
                    .map(|z| z.norm())
                    .find(|m| !(*m <= bound))
                {
                    return Err(err(
                        line,
                        ParseErrorKind::HasseViolation {
                            prime: q.generator.coords(),
                            norm: q.norm,
                            value: worst,
                        },
                    ));
                }
                if rec.eigenvalues.insert(q.generator.clone(), value).is_some() {
                    return Err(err(line, ParseErrorKind::DuplicatePrime(q.generator.coords())));
                }
            }
            other => return Err(syntax(line, format!("unknown keyword {other:?}"))),
        }
    }
    out.records.extend(current.take());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_FORMS: &str = "\
# two forms over Q(i)
field d=1 level lambda^3
form cm qf 0,1
ap 1,-1 = 0
ap 1,-2 = -2   # trailing comment
form other qf -2,0,1
ap 1,-1 = 0,1
";

    #[test]
    fn parses_well_formed_file() {
        let f = parse_forms(TWO_FORMS).unwrap();
        assert_eq!(f.records.len(), 2);
        assert_eq!(f.sections.iter().copied().collect::<Vec<_>>(), vec![(1, 3)]);
        assert_eq!(f.records[0].qf.degree(), 1);
        assert_eq!(f.records[1].qf.degree(), 2);
        assert_eq!(f.records[0].eigenvalues.len(), 2);
    }

    #[test]
    fn generators_are_canonicalised() {
        // 2+i and its associate -1+2i name the same prime.
        let text = "field d=1 level lambda^2\nform a qf 0,1\nap 2,1 = 0\n";
        let f = parse_forms(text).unwrap();
        let key = f.records[0].eigenvalues.keys().next().unwrap().coords();
        assert_eq!(key, "1,-2");
        let dup = "field d=1 level lambda^2\nform a qf 0,1\nap 2,1 = 0\nap -1,2 = 3\n";
        assert_eq!(
            parse_forms(dup).unwrap_err(),
            err(4, ParseErrorKind::DuplicatePrime("1,-2".into()))
        );
    }

    #[test]
    fn hasse_violation_is_reported() {
        let text = "field d=1 level lambda^3\nform bad qf 0,1\nap 2,1 = 100\n";
        let e = parse_forms(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::HasseViolation { norm: 5, .. }));
        // sqrt(20) is right at 2 sqrt(5); sqrt(21) is not
        assert!(parse_forms("field d=1 level lambda^3\nform ok qf -20,0,1\nap 2,1 = 0,1\n").is_ok());
        assert!(parse_forms("field d=1 level lambda^3\nform no qf -21,0,1\nap 2,1 = 0,1\n").is_err());
    }

    #[test]
    fn structural_errors() {
        let cases: &[(&str, usize)] = &[
            ("form a qf 0,1\n", 1),
            ("field d=1 level lambda^3\nap 1,1 = 0\n", 2),
            ("field d=2 level lambda^3\n", 1),
            ("field d=1 level lambda^4\n", 1),
            ("field d=1 level lambda^3\nform a qf 0,1\nform a qf 0,1\n", 3),
            ("field d=1 level lambda^3\nform a qf -4,0,1\n", 2),
            ("field d=1 level lambda^3\nform a qf 5\n", 2),
            ("field d=1 level lambda^3\nform a qf 0,1\nap 3,0 = 0\n", 3),
            ("field d=1 level lambda^3\nform a qf 0,1\nap 2,0 = 0\n", 3),
            ("field d=1 level lambda^3\nform a qf 0,1\nap 1,1 = 0,1\n", 3),
            ("field d=1 level lambda^3\nform a qf 0,1\nap 1,1 = 1/0\n", 3),
            ("field d=1 level lambda^3\nbogus\n", 2),
        ];
        for (text, line) in cases {
            let e = parse_forms(text).unwrap_err();
            assert_eq!(e.line, *line, "{text:?} -> {e}");
        }
    }

    #[test]
    fn same_id_at_different_levels_is_allowed() {
        let text = "field d=7 level lambda^2\nform a qf 0,1\nfield d=7 level lambda^3\nform a qf 0,1\n";
        assert_eq!(parse_forms(text).unwrap().records.len(), 2);
    }

    #[test]
    fn rational_syntax() {
        assert_eq!(parse_rational("-3/6"), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("7"), Some(BigRational::from_integer(7.into())));
        for bad in ["", "/", "1/", "a", "1/-0", "1.5", "+-1"] {
            assert_eq!(parse_rational(bad), None, "{bad:?}");
        }
    }
}
