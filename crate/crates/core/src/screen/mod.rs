//! Screening of number fields against the hypotheses of the asymptotic
//! results: signature `(p,p,3)` needs `Q(zeta_3) ⊂ K`, a unique prime above 3
//! and `h^+ = 1`; signature `(p,p,2)` needs 2 totally ramified and `h^+ = 1`.

pub mod fpoly;
pub mod records;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arith::is_prime;
use crate::bounds::resultant;
use crate::poly::IntPoly;
use fpoly::FpPoly;

pub use records::{parse_field_records, FieldRecord, ParsedRecords, RecordsError};

pub const DEFAULT_BUDGET: usize = 50;
pub const MAX_TOWER: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScreenError {
    #[error("tower index must lie in 1..={MAX_TOWER}, got {0}")]
    TowerOutOfRange(u32),
    #[error("prime budget must be at least 1")]
    ZeroBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    /// Conjunction where any `No` wins over `Unknown`.
    pub fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DedekindSplit {
    /// `(residue degree, ramification index)` per prime, sorted.
    pub shapes: Vec<(usize, u32)>,
    /// `p` does not divide `[O_K : Z[theta]]`, so the shapes are the primes above `p`.
    pub certified: bool,
}

impl DedekindSplit {
    pub fn is_totally_ramified(&self, degree: usize) -> bool {
        self.shapes == [(1, degree as u32)]
    }
}

/// Factors `poly` mod `p` and applies Dedekind's criterion.
pub fn dedekind_split(poly: &IntPoly, p: u64) -> DedekindSplit {
    let f = FpPoly::reduce(poly, p);
    let sff = f.squarefree_decomposition();
    let radical = sff.iter().fold(FpPoly::one(p), |acc, (a, _)| acc.mul(a));
    let cofactor = FpPoly::expand(p, &sff.iter().map(|(a, e)| (a.clone(), e - 1)).collect::<Vec<_>>());
    let gh = &radical.lift() * &cofactor.lift();
    let diff = poly - &gh;
    let pb = BigInt::from(p);
    debug_assert!(diff.coeffs().iter().all(|c| c.is_multiple_of(&pb)));
    let big_f = IntPoly::new(diff.coeffs().iter().map(|c| c / &pb).collect());
    let common = FpPoly::reduce(&big_f, p).gcd(&radical.gcd(&cofactor));
    DedekindSplit {
        shapes: f.factor_shape(),
        certified: common.is_one(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoWitness {
    /// Odd field degree: no quadratic subfield.
    OddDegree,
    /// A test prime `p ≡ 2 (mod 3)` with an odd-degree factor mod `p`.
    Prime(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Zeta3 {
    YesProbable { primes_tested: Vec<u64> },
    NoCertified { witness: NoWitness },
    Unknown,
}

fn poly_disc(poly: &IntPoly) -> BigInt {
    resultant(poly, &poly.derivative()).unwrap_or_else(|_| BigInt::zero())
}

/// Whether `x^2 + x + 1` has a root in `Q[x]/(poly)`. A prime `p ≡ 2 (mod 3)`
/// unramified in `K ⊇ Q(zeta_3)` has every residue degree even.
pub fn contains_zeta3(poly: &IntPoly, budget: usize) -> Zeta3 {
    let degree = poly.degree().unwrap_or(0);
    if degree % 2 == 1 {
        return Zeta3::NoCertified { witness: NoWitness::OddDegree };
    }
    let disc = poly_disc(poly);
    if disc.is_zero() || budget == 0 {
        return Zeta3::Unknown;
    }
    let mut tested = Vec::with_capacity(budget);
    let mut p = 2u64;
    while tested.len() < budget {
        if p % 3 == 2 && is_prime(p) && !disc.is_multiple_of(&BigInt::from(p)) {
            if let Some(w) = zeta3_witness(poly, p) {
                return Zeta3::NoCertified { witness: NoWitness::Prime(w) };
            }
            tested.push(p);
        }
        p += 1;
    }
    Zeta3::YesProbable { primes_tested: tested }
}

/// `Some(p)` when `poly` mod `p` has an irreducible factor of odd degree.
pub fn zeta3_witness(poly: &IntPoly, p: u64) -> Option<u64> {
    let f = FpPoly::reduce(poly, p);
    f.factor_shape().iter().any(|(deg, _)| deg % 2 == 1).then_some(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PrimeCount {
    Known(usize),
    /// Dedekind's criterion failed; distinct factors mod `p` give a lower bound.
    Unknown { at_least: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScreeningVerdict {
    pub label: String,
    pub degree: usize,
    pub zeta3: Zeta3,
    pub split_at_3: DedekindSplit,
    pub primes_above_3: PrimeCount,
    pub split_at_2: DedekindSplit,
    pub h_plus_one: Tri,
    pub passes_pp3: Tri,
    pub ramified2: Tri,
    pub passes_pp2: Tri,
}

fn distinct_factors(split: &DedekindSplit) -> usize {
    split.shapes.len()
}

pub fn screen_record(rec: &FieldRecord, budget: usize) -> ScreeningVerdict {
    let zeta3 = contains_zeta3(&rec.poly, budget);
    let split_at_3 = dedekind_split(&rec.poly, 3);
    let primes_above_3 = if split_at_3.certified {
        PrimeCount::Known(distinct_factors(&split_at_3))
    } else {
        PrimeCount::Unknown { at_least: distinct_factors(&split_at_3) }
    };
    let h_plus_one = rec.h_plus.map_or(Tri::Unknown, |h| Tri::from_bool(h == 1));
    let zeta_tri = match zeta3 {
        Zeta3::YesProbable { .. } => Tri::Yes,
        Zeta3::NoCertified { .. } => Tri::No,
        Zeta3::Unknown => Tri::Unknown,
    };
    let unique3 = match primes_above_3 {
        PrimeCount::Known(n) => Tri::from_bool(n == 1),
        PrimeCount::Unknown { at_least } if at_least > 1 => Tri::No,
        PrimeCount::Unknown { .. } => Tri::Unknown,
    };
    let split_at_2 = dedekind_split(&rec.poly, 2);
    // Distinct factors mod 2 already force distinct primes above 2, and an odd
    // field discriminant means 2 is unramified.
    let unramified2 = !rec.disc.is_zero() && rec.disc.is_odd();
    let ramified2 = if unramified2 {
        Tri::No
    } else if split_at_2.certified || distinct_factors(&split_at_2) > 1 {
        Tri::from_bool(split_at_2.is_totally_ramified(rec.degree))
    } else {
        Tri::Unknown
    };
    ScreeningVerdict {
        label: rec.label.clone(),
        degree: rec.degree,
        passes_pp3: zeta_tri.and(unique3).and(h_plus_one),
        passes_pp2: ramified2.and(h_plus_one),
        zeta3,
        split_at_3,
        primes_above_3,
        split_at_2,
        h_plus_one,
        ramified2,
    }
}

/// Verdicts for every record, sorted by label. Records are screened in
/// parallel; the result does not depend on input order.
pub fn screen_all(records: &[FieldRecord], budget: usize) -> Result<Vec<ScreeningVerdict>, ScreenError> {
    if budget == 0 {
        return Err(ScreenError::ZeroBudget);
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = records.len().div_ceil(threads).max(1);
    let mut out: Vec<ScreeningVerdict> = std::thread::scope(|s| {
        let handles: Vec<_> = records
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(|r| screen_record(r, budget)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("screening worker")).collect()
    });
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Pp3Row {
    pub total: usize,
    /// Records with class number one.
    pub f_n: usize,
    /// Those among `f_n` that pass.
    pub k_n: usize,
    /// Those among `f_n` left undecided.
    pub undecided: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Pp2Row {
    pub total: usize,
    /// 2 totally ramified.
    pub f_n: usize,
    /// ... and odd narrow class number.
    pub g_n: usize,
    /// ... and narrow class number one.
    pub k_n: usize,
    pub undecided: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Screening<R> {
    pub verdicts: Vec<ScreeningVerdict>,
    pub summary: BTreeMap<usize, R>,
    pub skipped: usize,
}

pub fn screen_pp3(parsed: &ParsedRecords, budget: usize) -> Result<Screening<Pp3Row>, ScreenError> {
    let verdicts = screen_all(&parsed.records, budget)?;
    let mut summary: BTreeMap<usize, Pp3Row> = BTreeMap::new();
    for (rec, v) in sorted(&parsed.records).zip(&verdicts) {
        let row = summary.entry(rec.degree).or_default();
        row.total += 1;
        if rec.h == Some(1) {
            row.f_n += 1;
            match v.passes_pp3 {
                Tri::Yes => row.k_n += 1,
                Tri::Unknown => row.undecided += 1,
                Tri::No => {}
            }
        }
    }
    Ok(Screening { verdicts, summary, skipped: parsed.warnings.len() })
}

pub fn screen_pp2(parsed: &ParsedRecords, budget: usize) -> Result<Screening<Pp2Row>, ScreenError> {
    let verdicts = screen_all(&parsed.records, budget)?;
    let mut summary: BTreeMap<usize, Pp2Row> = BTreeMap::new();
    for (rec, v) in sorted(&parsed.records).zip(&verdicts) {
        let row = summary.entry(rec.degree).or_default();
        row.total += 1;
        match v.ramified2 {
            Tri::Yes => {
                row.f_n += 1;
                match rec.h_plus {
                    Some(h) if h % 2 == 1 => {
                        row.g_n += 1;
                        if h == 1 {
                            row.k_n += 1;
                        }
                    }
                    Some(_) => {}
                    None => row.undecided += 1,
                }
            }
            Tri::Unknown => row.undecided += 1,
            Tri::No => {}
        }
    }
    Ok(Screening { verdicts, summary, skipped: parsed.warnings.len() })
}

fn sorted(records: &[FieldRecord]) -> impl Iterator<Item = &FieldRecord> {
    let mut v: Vec<&FieldRecord> = records.iter().collect();
    v.sort_by(|a, b| a.label.cmp(&b.label));
    v.into_iter()
}

/// `f_1 = x^2 - 2`, `f_n = f_{n-1}^2 - 2`.
pub fn tower_poly(n: u32) -> Result<IntPoly, ScreenError> {
    if !(1..=MAX_TOWER).contains(&n) {
        return Err(ScreenError::TowerOutOfRange(n));
    }
    let two = IntPoly::constant(2);
    let mut f = &(&IntPoly::x() * &IntPoly::x()) - &two;
    for _ in 1..n {
        f = &(&f * &f) - &two;
    }
    Ok(f)
}
