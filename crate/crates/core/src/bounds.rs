//! Explicit constants: the resultant bound `C_K`, ray class groups of modulus
//! `lambda^m`, the Hasse sets `A(q)`, and the assembled `B_K`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorize_u64, hasse_bound};
use crate::frey::CubicReading;
use crate::poly::IntPoly;
use crate::ring::{residue_ring, unit_image_mod, PrimeIdeal, QuadraticField, Residue, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("resultant of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("ray class modulus exponent {0} out of range 0..=3")]
    ModulusOutOfRange(u32),
    #[error("A(q) is not defined at lambda")]
    LambdaNotAllowed,
    #[error("{0} is too large to factor by trial division")]
    TooLargeToFactor(BigInt),
}

/// A candidate characteristic polynomial `x^2 - a x + N` of Frobenius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharPolyCandidate {
    pub trace: i64,
    pub poly: IntPoly,
}

/// All `x^2 - a x + n` with `|a| <= floor(2 sqrt(n))`, ordered by `|a|` and
/// then positive trace first.
pub fn hasse_charpolys(n: u64) -> Vec<CharPolyCandidate> {
    let bound = hasse_bound(n);
    let mut traces = vec![0i64];
    for a in 1..=bound {
        traces.push(a);
        traces.push(-a);
    }
    traces
        .into_iter()
        .map(|a| CharPolyCandidate {
            trace: a,
            poly: IntPoly::from_i64(&[n as i64, -a, 1]),
        })
        .collect()
}

/// `Res(p, q)` as the determinant of the Sylvester matrix with the rows of
/// `p` first, so that `Res(p, q) = lead(p)^deg(q) * prod q(alpha)` over the
/// roots `alpha` of `p`.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> Result<BigInt, BoundsError> {
    let (Some(m), Some(n)) = (p.degree(), q.degree()) else {
        return Err(BoundsError::ZeroPolynomial);
    };
    if m == 0 {
        return Ok(num_traits::pow(p.lead(), n));
    }
    if n == 0 {
        return Ok(num_traits::pow(q.lead(), m));
    }
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in p.coeffs().iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in q.coeffs().iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    Ok(bareiss_determinant(rows))
}

/// Fraction-free Gaussian elimination; every division is exact.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CkCase {
    /// Resultants against `x^4 - 9` (inertia order 4 at lambda).
    Quartic,
    /// Resultants against `x^12 - 9` (inertia order 12 at lambda).
    Duodecic,
}

impl CkCase {
    pub fn exponent(self) -> usize {
        match self {
            CkCase::Quartic => 4,
            CkCase::Duodecic => 12,
        }
    }

    /// The case selected by the cubic test under the chosen reading.
    pub fn from_cubic(cubic_solvable: bool, reading: CubicReading) -> CkCase {
        if reading.inertia_order_twelve(cubic_solvable) {
            CkCase::Duodecic
        } else {
            CkCase::Quartic
        }
    }

    /// `x^e - 9`.
    pub fn target(self) -> IntPoly {
        &IntPoly::monomial(self.exponent()) - &IntPoly::constant(9)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CkRow {
    pub trace: i64,
    pub poly: IntPoly,
    #[serde(serialize_with = "crate::serde_big::int::serialize")]
    pub resultant: BigInt,
    /// `(prime, exponent)` pairs of `|resultant|`.
    pub factorization: Vec<(u64, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CkTable {
    pub case: CkCase,
    pub c_k: u64,
    pub rows: Vec<CkRow>,
}

/// Resultants of `x^e - 9` with the thirteen Frobenius candidates at
/// `lambda`, their factorizations, and the largest prime that occurs.
pub fn compute_ck(case: CkCase) -> Result<CkTable, BoundsError> {
    let target = case.target();
    let mut rows = Vec::new();
    for cand in hasse_charpolys(9) {
        let res = resultant(&target, &cand.poly)?;
        let mag = res
            .abs()
            .to_u64()
            .ok_or_else(|| BoundsError::TooLargeToFactor(res.clone()))?;
        let factorization = if mag == 0 { Vec::new() } else { factorize_u64(mag) };
        rows.push(CkRow {
            trace: cand.trace,
            poly: cand.poly,
            resultant: res,
            factorization,
        });
    }
    let c_k = rows
        .iter()
        .flat_map(|r| r.factorization.iter().map(|&(p, _)| p))
        .max()
        .unwrap_or(1);
    Ok(CkTable { case, c_k, rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayClassGroup {
    pub field: QuadraticField,
    pub modulus_exponent: u32,
    pub order: u64,
    /// Invariant factors `d_1 | d_2 | ...`, ascending; empty for the trivial group.
    pub abelian_invariants: Vec<u64>,
}

/// Ray class group of modulus `lambda^m`. With class number one this is
/// `(O_K / 3^m)^x` modulo the image of the global units.
pub fn ray_class_group(field: QuadraticField, m: u32) -> Result<RayClassGroup, BoundsError> {
    if m > 3 {
        return Err(BoundsError::ModulusOutOfRange(m));
    }
    if m == 0 {
        return Ok(RayClassGroup {
            field,
            modulus_exponent: 0,
            order: 1,
            abelian_invariants: Vec::new(),
        });
    }
    let ring = residue_ring(field, m)?;
    let image = unit_image_mod(field, m)?;
    let coset = |g: Residue| -> Residue {
        image
            .iter()
            .map(|&u| ring.mul(u, g))
            .min()
            .expect("unit image contains 1")
    };
    let mut reps: Vec<Residue> = ring.units().into_iter().map(coset).collect();
    reps.sort();
    reps.dedup();
    let one = coset(ring.one());
    let orders: Vec<u64> = reps
        .iter()
        .map(|&g| {
            let mut acc = g;
            let mut k = 1;
            while coset(acc) != one {
                acc = ring.mul(acc, g);
                k += 1;
            }
            k
        })
        .collect();
    Ok(RayClassGroup {
        field,
        modulus_exponent: m,
        order: reps.len() as u64,
        abelian_invariants: abelian_invariants(&orders),
    })
}

/// Invariant factors of a finite abelian group given the multiset of its
/// element orders.
///
/// For each prime `l`, `|G[l^k]| = l^(sum_i min(k, e_i))`, so successive
/// quotients of these counts give the conjugate partition of the exponents.
pub fn abelian_invariants(orders: &[u64]) -> Vec<u64> {
    let n = orders.len() as u64;
    let mut primary: Vec<Vec<u64>> = Vec::new();
    for (l, _) in factorize_u64(n.max(1)) {
        let mut counts = vec![1u64];
        let mut lk = 1u64;
        loop {
            lk *= l;
            let c = orders.iter().filter(|&&o| lk % o == 0).count() as u64;
            let last = *counts.last().expect("nonempty");
            if c == last {
                break;
            }
            counts.push(c);
        }
        let logs: Vec<u32> = counts.iter().map(|&c| ilog(c, l)).collect();
        // at_least[k-1] = number of cyclic factors of order >= l^k
        let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        let mut exps = Vec::new();
        for (k, &cnt) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                exps.push(l.pow(k as u32 + 1));
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        primary.push(exps);
    }
    let rank = primary.iter().map(Vec::len).max().unwrap_or(0);
    let mut out: Vec<u64> = (0..rank)
        .map(|i| primary.iter().filter_map(|v| v.get(i)).product())
        .collect();
    out.reverse();
    out
}

fn ilog(mut c: u64, l: u64) -> u32 {
    let mut e = 0;
    while c > 1 {
        c /= l;
        e += 1;
    }
    e
}

/// `A(q)`: integers `a` with `|a| <= 2 sqrt(Norm q)` and `a = Norm(q) + 1 (mod 3)`.
pub fn set_aq(q: &PrimeIdeal) -> Result<Vec<i64>, BoundsError> {
    if q.is_lambda() {
        return Err(BoundsError::LambdaNotAllowed);
    }
    Ok(set_aq_for_norm(q.norm))
}

pub fn set_aq_for_norm(norm: u64) -> Vec<i64> {
    let bound = hasse_bound(norm);
    let target = ((norm + 1) % 3) as i64;
    (-bound..=bound)
        .filter(|a| a.rem_euclid(3) == target)
        .collect()
}

/// One row of the table of prime torsion in `Gamma_0(N)^ab` for levels
/// `lambda, lambda^2, lambda^3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionRow {
    pub d: u32,
    pub level_exponents: [u32; 3],
    pub torsion_primes: &'static [u64],
    pub ell_k: u64,
}

// Ingested from the published abelianization computations; not derived here.
const TORSION_TABLE: [TorsionRow; 5] = [
    TorsionRow { d: 1, level_exponents: [1, 2, 3], torsion_primes: &[2, 3], ell_k: 3 },
    TorsionRow { d: 7, level_exponents: [1, 2, 3], torsion_primes: &[2, 3], ell_k: 3 },
    TorsionRow { d: 19, level_exponents: [1, 2, 3], torsion_primes: &[2, 3, 5], ell_k: 5 },
    TorsionRow {
        d: 43,
        level_exponents: [1, 2, 3],
        torsion_primes: &[2, 3, 5, 59, 67, 199],
        ell_k: 199,
    },
    TorsionRow {
        d: 67,
        level_exponents: [1, 2, 3],
        torsion_primes: &[2, 3, 5, 17, 19, 37, 47, 67],
        ell_k: 67,
    },
];

pub fn torsion_table() -> BTreeMap<u32, TorsionRow> {
    TORSION_TABLE.iter().map(|r| (r.d, r.clone())).collect()
}

pub fn torsion_row(field: QuadraticField) -> Option<TorsionRow> {
    TORSION_TABLE.iter().find(|r| r.d == field.d()).cloned()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub field: QuadraticField,
    pub ell_k: u64,
    pub c_k: u64,
    pub m_k: Option<u64>,
    pub b_k_case_i: u64,
    /// `None` when `M_K` was not supplied.
    pub b_k_case_ii: Option<u64>,
}

/// `B_K = max(ell_K, C_K)` for the first case and `max(ell_K, C_K, M_K)` for
/// the second; `C_K = 47` when the cubic is solvable and `44483` otherwise.
pub fn assemble_bk(field: QuadraticField, m_k: Option<u64>, cubic_solvable: bool) -> BoundsReport {
    assemble_bk_with(field, m_k, cubic_solvable, CubicReading::Statement)
}

pub fn assemble_bk_with(
    field: QuadraticField,
    m_k: Option<u64>,
    cubic_solvable: bool,
    reading: CubicReading,
) -> BoundsReport {
    let ell_k = torsion_row(field).map_or(0, |r| r.ell_k);
    let c_k = match CkCase::from_cubic(cubic_solvable, reading) {
        CkCase::Quartic => C_K_QUARTIC,
        CkCase::Duodecic => C_K_DUODECIC,
    };
    let b_k_case_i = ell_k.max(c_k);
    BoundsReport {
        field,
        ell_k,
        c_k,
        m_k,
        b_k_case_i,
        b_k_case_ii: m_k.map(|m| b_k_case_i.max(m)),
    }
}

/// Largest prime dividing `Res(x^4 - 9, P)` over the thirteen candidates.
pub const C_K_QUARTIC: u64 = 47;
/// Largest prime dividing `Res(x^12 - 9, P)` over the thirteen candidates.
pub const C_K_DUODECIC: u64 = 44483;
