//! Newform elimination from ingested Bianchi eigenvalue tables.
//!
//! For a newform `f` and a prime `q != lambda`,
//! `B_{f,q} = Norm(q) * ((Norm(q)+1)^2 - f(T_q)^2) * prod_{a in A(q)} (a - f(T_q))`.
//! A prime `p` for which the Frey curve's mod-`p` representation arises from
//! `f` divides `C_f`, computed here as the gcd over `q` of `|Norm(B_{f,q})|`.

pub mod cache;
pub mod expect;
pub mod parse;
pub mod qf;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::prime_divisors;
use crate::bounds::set_aq_for_norm;
use crate::frey::WeierstrassCurve;
use crate::ring::{valuation_at, PrimeIdeal, QuadraticField, ResidueField, RingElement, Valuation};

pub use parse::{parse_forms, FormsFile, ParseError, ParseErrorKind};
pub use qf::{CoefficientField, QfElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElimError {
    #[error("B_(f,q) is not defined at lambda")]
    LambdaNotAllowed,
    #[error("form {form} has no eigenvalue at {prime}")]
    MissingEigenvalue { form: String, prime: String },
    #[error("curve has bad reduction at {0}")]
    BadReduction(String),
    #[error("prime set is empty")]
    NoPrimes,
    #[error("prime {prime} lies in Q(sqrt(-{found})) but the form is over Q(sqrt(-{expected}))")]
    FieldMismatch { prime: String, found: u32, expected: u32 },
}

/// One Bianchi newform: its field, level `lambda^e`, eigenvalue field and
/// Hecke eigenvalues keyed by canonical prime generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenformRecord {
    pub field: QuadraticField,
    pub level_exponent: u32,
    pub form_id: String,
    pub qf: CoefficientField,
    pub eigenvalues: BTreeMap<RingElement, QfElement>,
}

impl EigenformRecord {
    pub fn eigenvalue(&self, q: &PrimeIdeal) -> Option<&QfElement> {
        self.eigenvalues.get(&q.generator.canonical_associate())
    }

    fn check_prime(&self, q: &PrimeIdeal) -> Result<(), ElimError> {
        if q.is_lambda() {
            return Err(ElimError::LambdaNotAllowed);
        }
        if q.field() != self.field {
            return Err(ElimError::FieldMismatch {
                prime: q.generator.coords(),
                found: q.field().d(),
                expected: self.field.d(),
            });
        }
        Ok(())
    }
}

/// `B_{f,q}` evaluated exactly in `Q_f`. The middle factor uses
/// `(Norm(q) + 1)^2`, the multiplicative-reduction trace congruence.
pub fn b_fq(form: &EigenformRecord, q: &PrimeIdeal) -> Result<QfElement, ElimError> {
    form.check_prime(q)?;
    let t = form.eigenvalue(q).ok_or_else(|| ElimError::MissingEigenvalue {
        form: form.form_id.clone(),
        prime: q.generator.coords(),
    })?;
    Ok(b_fq_value(&form.qf, q.norm, t))
}

fn b_fq_value(qf: &CoefficientField, norm: u64, t: &QfElement) -> QfElement {
    let n1 = BigInt::from(norm + 1);
    let middle = qf.sub(&qf.from_int(&n1 * &n1), &qf.mul(t, t));
    let mut acc = qf.mul(&qf.from_int(norm), &middle);
    for a in set_aq_for_norm(norm) {
        acc = qf.mul(&acc, &qf.sub(&qf.from_int(a), t));
    }
    acc
}

/// `|Norm_{Q_f/Q}(B_{f,q})|` for each prime, in the given order.
pub fn per_prime_norms(
    form: &EigenformRecord,
    primes: &[PrimeIdeal],
) -> Result<Vec<(PrimeIdeal, BigInt)>, ElimError> {
    primes
        .iter()
        .map(|q| {
            let b = b_fq(form, q)?;
            let n = form.qf.norm(&b);
            Ok((q.clone(), n.numer().abs()))
        })
        .collect()
}

/// `C_f = gcd_q |Norm(B_{f,q})|`; zero exactly when every term vanishes.
pub fn c_f(form: &EigenformRecord, primes: &[PrimeIdeal]) -> Result<BigInt, ElimError> {
    if primes.is_empty() {
        return Err(ElimError::NoPrimes);
    }
    Ok(gcd_all(per_prime_norms(form, primes)?.iter().map(|(_, n)| n)))
}

fn gcd_all<'a>(values: impl Iterator<Item = &'a BigInt>) -> BigInt {
    values.fold(BigInt::zero(), |g, n| g.gcd(n))
}

/// A CM Frey curve has potentially good reduction everywhere, so `j` is
/// integral; that forces `a` and `b` to be units and the equation has no such
/// nontrivial primitive solutions.
pub const CM_RATIONALE: &str = "C_f = 0 (CM form): the Frey curve would have integral j-invariant, \
forcing a and b to be units, which admits no nontrivial primitive solution";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Every prime divisor of `C_f` is at most the bound.
    EliminatedBelow { bound: u64 },
    /// `C_f = 0`: the form has CM.
    CmCandidate { rationale: String },
    /// Prime divisors of `C_f` above the bound.
    Survivors {
        #[serde(with = "crate::serde_big::vec")]
        primes: Vec<BigUint>,
    },
}

impl Verdict {
    pub fn has_survivors(&self) -> bool {
        matches!(self, Verdict::Survivors { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerPrimeRow {
    pub prime: String,
    pub norm: u64,
    #[serde(with = "crate::serde_big::int")]
    pub b_norm: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationReport {
    pub form_id: String,
    pub field: u32,
    pub level_exponent: u32,
    pub qf_poly: String,
    pub per_prime: Vec<PerPrimeRow>,
    #[serde(with = "crate::serde_big::int")]
    pub c_f: BigInt,
    #[serde(with = "crate::serde_big::vec")]
    pub prime_divisors: Vec<BigUint>,
    pub verdict: Verdict,
}

pub fn verdict(
    form: &EigenformRecord,
    b_k: u64,
    primes: &[PrimeIdeal],
) -> Result<EliminationReport, ElimError> {
    if primes.is_empty() {
        return Err(ElimError::NoPrimes);
    }
    let norms = per_prime_norms(form, primes)?;
    let cf = gcd_all(norms.iter().map(|(_, n)| n));
    let divisors = prime_divisors(&cf);
    let bound = BigUint::from(b_k);
    let verdict = if cf.is_zero() {
        Verdict::CmCandidate { rationale: CM_RATIONALE.to_string() }
    } else {
        let survivors: Vec<BigUint> = divisors.iter().filter(|p| **p > bound).cloned().collect();
        if survivors.is_empty() {
            Verdict::EliminatedBelow { bound: b_k }
        } else {
            Verdict::Survivors { primes: survivors }
        }
    };
    Ok(EliminationReport {
        form_id: form.form_id.clone(),
        field: form.field.d(),
        level_exponent: form.level_exponent,
        qf_poly: form.qf.poly().to_string(),
        per_prime: norms
            .into_iter()
            .map(|(q, n)| PerPrimeRow {
                prime: q.generator.coords(),
                norm: q.norm,
                b_norm: n,
            })
            .collect(),
        c_f: cf,
        prime_divisors: divisors,
        verdict,
    })
}

/// Verdicts for every record, ordered by `(level, form_id)`.
pub fn verdicts(
    records: &[EigenformRecord],
    b_k: u64,
    primes: &[PrimeIdeal],
) -> Result<Vec<EliminationReport>, ElimError> {
    let mut sorted: Vec<&EigenformRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.field, a.level_exponent, &a.form_id).cmp(&(b.field, b.level_exponent, &b.form_id))
    });
    sorted.into_iter().map(|f| verdict(f, b_k, primes)).collect()
}

/// The elimination prime set: all `q != lambda` with `Norm(q) < bound`.
pub fn elimination_primes(field: QuadraticField, norm_bound: u64) -> Vec<PrimeIdeal> {
    crate::ring::primes_up_to_norm(field, norm_bound.saturating_sub(1))
        .into_iter()
        .filter(|q| !q.is_lambda())
        .collect()
}

/// `#E(O_K / q)` by exhaustive point counting, including the point at infinity.
pub fn count_points(curve: &WeierstrassCurve, q: &PrimeIdeal) -> u64 {
    let fq = ResidueField::new(q);
    let [a1, a2, a3, a4, a6] =
        [&curve.a1, &curve.a2, &curve.a3, &curve.a4, &curve.a6].map(|c| fq.reduce(c));
    let elems = fq.elements();
    let mut count = 1;
    for &x in &elems {
        let x2 = fq.mul(x, x);
        let rhs = fq.add(
            fq.add(fq.mul(x2, x), fq.mul(a2, x2)),
            fq.add(fq.mul(a4, x), a6),
        );
        let lin = fq.add(fq.mul(a1, x), a3);
        for &y in &elems {
            if fq.add(fq.mul(y, y), fq.mul(lin, y)) == rhs {
                count += 1;
            }
        }
    }
    count
}

/// A rational-eigenvalue record with `a_q = Norm(q) + 1 - #E(F_q)` for a curve
/// with good reduction at every listed prime.
pub fn fixture_from_curve(
    curve: &WeierstrassCurve,
    primes: &[PrimeIdeal],
    form_id: &str,
    level_exponent: u32,
) -> Result<EigenformRecord, ElimError> {
    let field = curve.field();
    let qf = CoefficientField::rationals();
    let delta = curve.discriminant();
    let mut eigenvalues = BTreeMap::new();
    for q in primes {
        if valuation_at(&delta, q) != Valuation::Finite(0) {
            return Err(ElimError::BadReduction(q.generator.coords()));
        }
        let a_q = q.norm as i64 + 1 - count_points(curve, q) as i64;
        eigenvalues.insert(q.generator.canonical_associate(), qf.from_int(a_q));
    }
    Ok(EigenformRecord {
        field,
        level_exponent,
        form_id: form_id.to_string(),
        qf,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;
    use num_rational::BigRational;

    fn k(d: u32) -> QuadraticField {
        QuadraticField::new(d).unwrap()
    }

    fn rational_form(field: QuadraticField, values: &[(&PrimeIdeal, i64)]) -> EigenformRecord {
        let qf = CoefficientField::rationals();
        EigenformRecord {
            field,
            level_exponent: 3,
            form_id: "t".into(),
            eigenvalues: values
                .iter()
                .map(|(q, a)| (q.generator.clone(), qf.from_int(*a)))
                .collect(),
            qf,
        }
    }

    fn norm5(field: QuadraticField) -> PrimeIdeal {
        elimination_primes(field, 50).into_iter().find(|q| q.norm == 5).unwrap()
    }

    #[test]
    fn b_fq_examples() {
        let f = k(1);
        let q5 = norm5(f);
        let form = rational_form(f, &[(&q5, 2)]);
        assert_eq!(b_fq(&form, &q5).unwrap(), form.qf.from_int(1600));
        let form0 = rational_form(f, &[(&q5, 0)]);
        assert!(b_fq(&form0, &q5).unwrap().is_zero());
        let q2 = &elimination_primes(f, 50)[0];
        assert_eq!(q2.norm, 2);
        let form2 = rational_form(f, &[(q2, 0)]);
        assert!(b_fq(&form2, q2).unwrap().is_zero());
        assert_eq!(b_fq(&form, &f.lambda()), Err(ElimError::LambdaNotAllowed));
        assert!(matches!(b_fq(&form, q2), Err(ElimError::MissingEigenvalue { .. })));
    }

    #[test]
    fn b_fq_ignores_choice_of_generator() {
        let f = k(1);
        let q5 = norm5(f);
        let form = rational_form(f, &[(&q5, 2)]);
        for g in q5.generator.associates() {
            let q = PrimeIdeal { generator: g, ..q5.clone() };
            assert_eq!(b_fq(&form, &q).unwrap(), form.qf.from_int(1600));
        }
    }

    #[test]
    fn c_f_examples() {
        let f = k(7);
        let ps = elimination_primes(f, 50);
        let (q2, q2b) = (&ps[0], &ps[1]);
        assert_eq!((q2.norm, q2b.norm), (2, 2));
        // A(q) = {0} at norm 2: B = 2 (9 - a^2)(0 - a).
        let form = rational_form(f, &[(q2, 1)]);
        assert_eq!(c_f(&form, &ps[..1]).unwrap(), BigInt::from(16));
        let form = rational_form(f, &[(q2, 1), (q2b, -2)]);
        // 2*8*(-1) = -16 and 2*5*2 = 20
        assert_eq!(c_f(&form, &ps[..2]).unwrap(), BigInt::from(4));
        let form = rational_form(f, &[(q2, 0), (q2b, 0)]);
        assert_eq!(c_f(&form, &ps[..2]).unwrap(), BigInt::zero());
        let form = rational_form(f, &[(q2, 0), (q2b, 1)]);
        assert_eq!(c_f(&form, &ps[..2]).unwrap(), BigInt::from(16));
        assert_eq!(c_f(&form, &[]), Err(ElimError::NoPrimes));
    }

    #[test]
    fn gcd_of_norms() {
        let vals = [BigInt::from(1600), BigInt::from(360)];
        assert_eq!(gcd_all(vals.iter()), BigInt::from(40));
        let zeros = [BigInt::zero(), BigInt::zero()];
        assert_eq!(gcd_all(zeros.iter()), BigInt::zero());
    }

    #[test]
    fn verdict_examples() {
        let f = k(1);
        let q5 = norm5(f);
        let form = rational_form(f, &[(&q5, 2)]);
        let r = verdict(&form, 199, &[q5.clone()]).unwrap();
        assert_eq!(r.c_f, BigInt::from(1600));
        assert_eq!(r.verdict, Verdict::EliminatedBelow { bound: 199 });
        let r = verdict(&form, 3, &[q5.clone()]).unwrap();
        assert_eq!(r.verdict, Verdict::Survivors { primes: vec![BigUint::from(5u32)] });
        let cm = rational_form(f, &[(&q5, 0)]);
        assert!(matches!(
            verdict(&cm, 199, &[q5]).unwrap().verdict,
            Verdict::CmCandidate { .. }
        ));
    }

    #[test]
    fn quadratic_eigenvalue_norms() {
        // s = sqrt(2) at norm 5: B = 5 (36 - 2)(-3 - s)(-s)(3 - s) = 170 * 7s,
        // and Norm(1190 s) = -2 * 1190^2.
        let f = k(1);
        let q5 = norm5(f);
        let qf = CoefficientField::new(IntPoly::from_i64(&[-2, 0, 1])).unwrap();
        let s = qf
            .element(vec![BigRational::zero(), BigRational::from_integer(1.into())])
            .unwrap();
        let form = EigenformRecord {
            field: f,
            level_exponent: 3,
            form_id: "s".into(),
            eigenvalues: [(q5.generator.clone(), s)].into_iter().collect(),
            qf,
        };
        let b = b_fq(&form, &q5).unwrap();
        assert_eq!(
            b.coords().to_vec(),
            vec![BigRational::zero(), BigRational::from_integer(1190.into())]
        );
        assert_eq!(c_f(&form, &[q5]).unwrap(), BigInt::from(2 * 1190 * 1190));
    }

    #[test]
    fn point_count_small_curve() {
        // Y^2 - Y = X^3 over F_2: X = 0 gives Y in {0, 1}; X = 1 gives Y^2 + Y = 1, no roots.
        let f = k(7);
        let z = f.zero();
        let curve =
            WeierstrassCurve::new([z.clone(), z.clone(), f.element(-1, 0), z.clone(), z]).unwrap();
        let q2 = &elimination_primes(f, 50)[0];
        assert_eq!(count_points(&curve, q2), 3);
    }

    #[test]
    fn fixture_rejects_bad_reduction() {
        // Y^2 = X^3 - X has discriminant 64; it is bad above 2.
        let f = k(1);
        let z = f.zero();
        let curve =
            WeierstrassCurve::new([z.clone(), z.clone(), z.clone(), f.element(-1, 0), z]).unwrap();
        let ps = elimination_primes(f, 50);
        assert_eq!(
            fixture_from_curve(&curve, &ps, "x", 3),
            Err(ElimError::BadReduction(ps[0].generator.coords()))
        );
    }
}
