//! Per-field qualitative expectations on `C_f`, checked only for the
//! `(field, level)` sections that actually occur in an ingested file.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use super::EliminationReport;

pub const BUNDLED: &str = include_str!("../../data/expectations.txt");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Token {
    Cm,
    One,
    Div(Vec<u64>),
    Pow(u64),
}

impl Token {
    pub fn matches(&self, c_f: &BigInt) -> bool {
        match self {
            Token::Cm => c_f.is_zero(),
            Token::One => c_f.is_one(),
            Token::Div(ps) => !c_f.is_zero() && ps.iter().all(|p| c_f.is_multiple_of(&BigInt::from(*p))),
            Token::Pow(l) => {
                if c_f.is_zero() {
                    return false;
                }
                let l = BigInt::from(*l);
                let mut n = c_f.clone();
                while n.is_multiple_of(&l) {
                    n /= &l;
                }
                n.is_one()
            }
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Cm => write!(f, "cm"),
            Token::One => write!(f, "one"),
            Token::Div(ps) => {
                let s: Vec<String> = ps.iter().map(u64::to_string).collect();
                write!(f, "div={}", s.join(","))
            }
            Token::Pow(l) => write!(f, "pow={l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expectation {
    pub d: u32,
    pub level_exponent: u32,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("expectations line {line}: {msg}")]
pub struct ExpectError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_expectations(text: &str) -> Result<BTreeMap<(u32, u32), Expectation>, ExpectError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| ExpectError { line: i + 1, msg: msg.to_string() };
        let mut parts = line.split_whitespace();
        let mut num = |what: &str| -> Result<u32, ExpectError> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(&format!("missing or bad {what}")))
        };
        let d = num("d")?;
        let level = num("level")?;
        let count = num("count")? as usize;
        let tokens = parts.map(|t| parse_token(t).ok_or_else(|| err(&format!("bad token {t:?}"))));
        let tokens = tokens.collect::<Result<Vec<_>, _>>()?;
        if tokens.len() != count {
            return Err(err("token count differs from form count"));
        }
        if out
            .insert((d, level), Expectation { d, level_exponent: level, tokens })
            .is_some()
        {
            return Err(err("duplicate section"));
        }
    }
    Ok(out)
}

fn parse_token(t: &str) -> Option<Token> {
    let primes = |s: &str| -> Option<Vec<u64>> { s.split(',').map(|p| p.parse().ok()).collect() };
    match t {
        "cm" => Some(Token::Cm),
        "one" => Some(Token::One),
        _ => {
            if let Some(rest) = t.strip_prefix("div=") {
                primes(rest).map(Token::Div)
            } else if let Some(rest) = t.strip_prefix("pow=") {
                rest.parse().ok().map(Token::Pow)
            } else {
                None
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Met,
    Unmet { detail: String },
    /// No expectation row exists for this section.
    Unlisted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionCheck {
    pub d: u32,
    pub level_exponent: u32,
    pub outcome: Outcome,
}

/// Checks each `(d, level)` section present in `sections` against the
/// expectations. Sections absent from the input are not reported.
pub fn check(
    expectations: &BTreeMap<(u32, u32), Expectation>,
    sections: impl IntoIterator<Item = (u32, u32)>,
    reports: &[EliminationReport],
) -> Vec<SectionCheck> {
    sections
        .into_iter()
        .map(|(d, level)| {
            let c_fs: Vec<&BigInt> = reports
                .iter()
                .filter(|r| r.field == d && r.level_exponent == level)
                .map(|r| &r.c_f)
                .collect();
            let outcome = match expectations.get(&(d, level)) {
                None => Outcome::Unlisted,
                Some(e) => check_section(&e.tokens, &c_fs),
            };
            SectionCheck { d, level_exponent: level, outcome }
        })
        .collect()
}

fn check_section(tokens: &[Token], c_fs: &[&BigInt]) -> Outcome {
    if tokens.len() != c_fs.len() {
        return Outcome::Unmet {
            detail: format!("expected {} forms, found {}", tokens.len(), c_fs.len()),
        };
    }
    let mut used = vec![false; c_fs.len()];
    if assign(tokens, c_fs, &mut used) {
        Outcome::Met
    } else {
        let got: Vec<String> = c_fs.iter().map(|c| c.to_string()).collect();
        let want: Vec<String> = tokens.iter().map(Token::to_string).collect();
        Outcome::Unmet {
            detail: format!("C_f values [{}] do not match [{}]", got.join(", "), want.join(" ")),
        }
    }
}

fn assign(tokens: &[Token], c_fs: &[&BigInt], used: &mut [bool]) -> bool {
    let Some((first, rest)) = tokens.split_first() else {
        return true;
    };
    for i in 0..c_fs.len() {
        if !used[i] && first.matches(c_fs[i]) {
            used[i] = true;
            if assign(rest, c_fs, used) {
                return true;
            }
            used[i] = false;
        }
    }
    false
}
