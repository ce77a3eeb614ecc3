//! The Frey curve `E : Y^2 + 3cXY + b^p Y = X^3` attached to a putative
//! solution of `a^p + b^p = c^3`, and its local behaviour.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::arith::is_prime;
use crate::ring::{
    residue_ring, val_lambda, valuation_at, PrimeIdeal, QuadraticField, RingElement, RingError,
    Valuation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreyError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("exponent {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("closed form for {which} disagrees with the Weierstrass model although a^p + b^p = c^3")]
    ClosedFormMismatch { which: &'static str },
    #[error("degenerate input: the discriminant vanishes")]
    Degenerate,
    #[error("{0} lies above 3; use the lambda classification")]
    PrimeAboveThree(PrimeIdeal),
    #[error("not semistable at {0}: q divides both the discriminant and c4")]
    NotSemistable(PrimeIdeal),
    #[error("minimal-model bookkeeping gives v_lambda(Delta_min) = {0} < 0; input cannot come from a primitive solution")]
    NonMinimalBookkeeping(i64),
    #[error("lambda does not divide b; the j-valuation formula needs v_lambda(b) >= 1")]
    LambdaDoesNotDivideB,
    #[error("cubic test requires lambda not dividing b*c")]
    CubicPrecondition,
}

/// A general Weierstrass model `Y^2 + a1 XY + a3 Y = X^3 + a2 X^2 + a4 X + a6`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeierstrassCurve {
    pub a1: RingElement,
    pub a2: RingElement,
    pub a3: RingElement,
    pub a4: RingElement,
    pub a6: RingElement,
}

impl WeierstrassCurve {
    pub fn new(coeffs: [RingElement; 5]) -> Result<Self, RingError> {
        let field = coeffs[0].field();
        if let Some(bad) = coeffs.iter().find(|c| c.field() != field) {
            return Err(RingError::MixedFields(field.d(), bad.field().d()));
        }
        let [a1, a2, a3, a4, a6] = coeffs;
        Ok(WeierstrassCurve { a1, a2, a3, a4, a6 })
    }

    pub fn field(&self) -> QuadraticField {
        self.a1.field()
    }

    fn k(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }

    pub fn b2(&self) -> RingElement {
        &(&self.a1 * &self.a1) + &self.a2.scale(&self.k(4))
    }

    pub fn b4(&self) -> RingElement {
        &(&self.a1 * &self.a3) + &self.a4.scale(&self.k(2))
    }

    pub fn b6(&self) -> RingElement {
        &(&self.a3 * &self.a3) + &self.a6.scale(&self.k(4))
    }

    pub fn b8(&self) -> RingElement {
        let a1sq = &self.a1 * &self.a1;
        let t1 = &a1sq * &self.a6;
        let t2 = (&self.a2 * &self.a6).scale(&self.k(4));
        let t3 = &(&self.a1 * &self.a3) * &self.a4;
        let t4 = &(&self.a2 * &self.a3) * &self.a3;
        let t5 = &self.a4 * &self.a4;
        &(&(&(&t1 + &t2) - &t3) + &t4) - &t5
    }

    pub fn c4(&self) -> RingElement {
        let b2 = self.b2();
        &(&b2 * &b2) - &self.b4().scale(&self.k(24))
    }

    pub fn c6(&self) -> RingElement {
        let b2 = self.b2();
        let b2cube = &(&b2 * &b2) * &b2;
        let t2 = (&b2 * &self.b4()).scale(&self.k(36));
        let t3 = self.b6().scale(&self.k(216));
        &(&t2 - &b2cube) - &t3
    }

    pub fn discriminant(&self) -> RingElement {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        let t1 = -(&(&b2 * &b2) * &b8);
        let t2 = (&(&b4 * &b4) * &b4).scale(&self.k(8));
        let t3 = (&b6 * &b6).scale(&self.k(27));
        let t4 = (&(&b2 * &b4) * &b6).scale(&self.k(9));
        &(&(&t1 - &t2) - &t3) + &t4
    }
}

/// Invariants of the Frey curve of `(a, b, c)` at exponent `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreyInvariants {
    pub a: RingElement,
    pub b: RingElement,
    pub c: RingElement,
    pub a1: RingElement,
    pub a3: RingElement,
    pub c4: RingElement,
    pub c6: RingElement,
    pub delta: RingElement,
    /// `j = j_num / j_den` with `j_num = c4^3` and `j_den = Delta`.
    pub j_num: RingElement,
    pub j_den: RingElement,
    pub exponent_p: u64,
    /// Whether `a^p + b^p = c^3` holds for the supplied triple.
    pub relation_holds: bool,
    /// `Delta = 0`.
    pub degenerate: bool,
}

impl FreyInvariants {
    pub fn field(&self) -> QuadraticField {
        self.a.field()
    }

    pub fn curve(&self) -> WeierstrassCurve {
        let z = self.field().zero();
        WeierstrassCurve {
            a1: self.a1.clone(),
            a2: z.clone(),
            a3: self.a3.clone(),
            a4: z.clone(),
            a6: z,
        }
    }
}

fn check_odd_prime(p: u64) -> Result<(), FreyError> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(FreyError::NotOddPrime(p))
    }
}

fn same_field(elems: &[&RingElement]) -> Result<QuadraticField, FreyError> {
    let field = elems[0].field();
    for e in elems {
        if e.field() != field {
            return Err(RingError::MixedFields(field.d(), e.field().d()).into());
        }
    }
    Ok(field)
}

/// Builds the Frey curve and its invariants from the Weierstrass model; when
/// the triple satisfies `a^p + b^p = c^3` the closed forms
/// `c4 = 9c(9a^p + b^p)`, `c6 = -27(27c^6 - 36c^3 b^p + 8b^{2p})` and
/// `Delta = 27(ab^3)^p` are evaluated as well and must agree.
pub fn frey_invariants(
    a: &RingElement,
    b: &RingElement,
    c: &RingElement,
    p: u64,
) -> Result<FreyInvariants, FreyError> {
    let field = same_field(&[a, b, c])?;
    check_odd_prime(p)?;
    let k = |n: i64| BigInt::from(n);

    let ap = a.pow(p);
    let bp = b.pow(p);
    let c3 = c.pow(3);
    let relation_holds = &ap + &bp == c3;

    let zero = field.zero();
    let curve = WeierstrassCurve {
        a1: c.scale(&k(3)),
        a2: zero.clone(),
        a3: bp.clone(),
        a4: zero.clone(),
        a6: zero,
    };
    let c4 = curve.c4();
    let c6 = curve.c6();
    let delta = curve.discriminant();

    if relation_holds {
        let closed_c4 = (c * &(&ap.scale(&k(9)) + &bp)).scale(&k(9));
        let c6_inner = &(&c3 * &c3).scale(&k(27)) - &(&c3 * &bp).scale(&k(36));
        let closed_c6 = (&c6_inner + &(&bp * &bp).scale(&k(8))).scale(&k(-27));
        let closed_delta = (a * &b.pow(3)).pow(p).scale(&k(27));
        if closed_c4 != c4 {
            return Err(FreyError::ClosedFormMismatch { which: "c4" });
        }
        if closed_c6 != c6 {
            return Err(FreyError::ClosedFormMismatch { which: "c6" });
        }
        if closed_delta != delta {
            return Err(FreyError::ClosedFormMismatch { which: "Delta" });
        }
    }

    let j_num = &(&c4 * &c4) * &c4;
    Ok(FreyInvariants {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        a1: curve.a1,
        a3: curve.a3,
        degenerate: delta.is_zero(),
        j_den: delta.clone(),
        j_num,
        c4,
        c6,
        delta,
        exponent_p: p,
        relation_holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    Good,
    Multiplicative,
    Additive,
}

/// A conductor exponent, either exact or known only up to a set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ConductorExponent {
    Exact(u32),
    OneOf(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalClassification {
    pub prime: PrimeIdeal,
    pub reduction: Reduction,
    pub conductor_exponent: ConductorExponent,
    pub pot_mult: bool,
    pub p_divides_inertia_image_order: bool,
    /// Valuation of the (minimal) discriminant where it is determined.
    pub disc_valuation: Option<i64>,
}

/// Classification at a prime `q` not above 3, where the Frey model is minimal.
pub fn classify_away_from_lambda(
    inv: &FreyInvariants,
    q: &PrimeIdeal,
) -> Result<LocalClassification, FreyError> {
    if q.residue_char == 3 {
        return Err(FreyError::PrimeAboveThree(q.clone()));
    }
    let v_delta = match valuation_at(&inv.delta, q) {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(FreyError::Degenerate),
    };
    if v_delta == 0 {
        return Ok(LocalClassification {
            prime: q.clone(),
            reduction: Reduction::Good,
            conductor_exponent: ConductorExponent::Exact(0),
            pot_mult: false,
            p_divides_inertia_image_order: false,
            disc_valuation: Some(0),
        });
    }
    if valuation_at(&inv.c4, q) != Valuation::Finite(0) {
        return Err(FreyError::NotSemistable(q.clone()));
    }
    // Multiplicative: v_q(j) = -v_q(Delta).
    let p_divides = v_delta % inv.exponent_p == 0;
    Ok(LocalClassification {
        prime: q.clone(),
        reduction: Reduction::Multiplicative,
        conductor_exponent: ConductorExponent::Exact(1),
        pot_mult: true,
        p_divides_inertia_image_order: !p_divides,
        disc_valuation: Some(v_delta as i64),
    })
}

/// Reduction type and conductor exponent at `lambda`.
///
/// When `lambda | ab` the model is made minimal by `X = 9x, Y = 27y`, which
/// lowers `v_lambda(Delta)` by 12.
pub fn lambda_exponent(
    a: &RingElement,
    b: &RingElement,
    c: &RingElement,
    p: u64,
) -> Result<LocalClassification, FreyError> {
    let field = same_field(&[a, b, c])?;
    check_odd_prime(p)?;
    let (Valuation::Finite(va), Valuation::Finite(vb)) = (val_lambda(a), val_lambda(b)) else {
        return Err(FreyError::Degenerate);
    };
    let lambda = field.lambda();
    if va + vb == 0 {
        return Ok(LocalClassification {
            prime: lambda,
            reduction: Reduction::Additive,
            conductor_exponent: ConductorExponent::OneOf(vec![2, 3]),
            pot_mult: false,
            p_divides_inertia_image_order: false,
            disc_valuation: None,
        });
    }
    let v_min = 3 + (p as i64) * (va + 3 * vb) as i64 - 12;
    match v_min {
        v if v < 0 => Err(FreyError::NonMinimalBookkeeping(v)),
        0 => Ok(LocalClassification {
            prime: lambda,
            reduction: Reduction::Good,
            conductor_exponent: ConductorExponent::Exact(0),
            pot_mult: false,
            p_divides_inertia_image_order: false,
            disc_valuation: Some(0),
        }),
        v => Ok(LocalClassification {
            prime: lambda,
            reduction: Reduction::Multiplicative,
            conductor_exponent: ConductorExponent::Exact(1),
            pot_mult: true,
            p_divides_inertia_image_order: v % p as i64 != 0,
            disc_valuation: Some(v),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JValuation {
    pub v: i64,
    pub pot_mult: bool,
    pub p_in_inertia: bool,
}

/// `v_lambda(j) = 3 v_lambda(3) - 3pk` for `k = v_lambda(b) >= 1`, with
/// `v_lambda(3) = 1` in every supported field.
pub fn j_valuation_at_lambda(b: &RingElement, p: u64) -> Result<JValuation, FreyError> {
    check_odd_prime(p)?;
    let k = match val_lambda(b) {
        Valuation::Infinite => return Err(FreyError::Degenerate),
        Valuation::Finite(0) => return Err(FreyError::LambdaDoesNotDivideB),
        Valuation::Finite(k) => k as i64,
    };
    let v = 3 - 3 * p as i64 * k;
    Ok(JValuation {
        v,
        pot_mult: v < 0,
        p_in_inertia: v < 0 && v % p as i64 != 0,
    })
}

/// `3 v_lambda(c4) - v_lambda(Delta)` read directly off the model; `None`
/// when `j = 0` or the curve is singular.
pub fn j_valuation_from_model(inv: &FreyInvariants) -> Option<i64> {
    let vc4 = val_lambda(&inv.c4).finite()? as i64;
    let vd = val_lambda(&inv.delta).finite()? as i64;
    Some(3 * vc4 - vd)
}

/// Whether `y^3 + 24 b^p c y + 16 b^{2p}` has a root in `O_K / 9`,
/// decided by testing all 81 residues.
pub fn cubic_test(b: &RingElement, c: &RingElement, p: u64) -> Result<bool, FreyError> {
    let field = same_field(&[b, c])?;
    check_odd_prime(p)?;
    if val_lambda(&(b * c)) != Valuation::Finite(0) {
        return Err(FreyError::CubicPrecondition);
    }
    let ring = residue_ring(field, 2)?;
    let bp = ring.pow(ring.reduce(b), p);
    let cr = ring.reduce(c);
    let linear = ring.scale(24, ring.mul(bp, cr));
    let constant = ring.scale(16, ring.mul(bp, bp));
    let solvable = ring.elements().any(|y| {
        let y3 = ring.mul(ring.mul(y, y), y);
        ring.add(ring.add(y3, ring.mul(linear, y)), constant) == ring.zero()
    });
    Ok(solvable)
}

/// How the raw cubic-test boolean maps to the inertia order at `lambda`.
///
/// The irreducibility argument states that `C_K = 47` when the cubic is
/// solvable (inertia order 4), while its proof text attributes the order-12
/// case to solvability. Both readings are exposed; neither is assumed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum CubicReading {
    /// Solvable cubic means inertia order 4 and `C_K = 47`.
    #[default]
    Statement,
    /// Solvable cubic means inertia order 12 and `C_K = 44483`.
    Proof,
}

impl CubicReading {
    pub fn inertia_order_twelve(self, cubic_solvable: bool) -> bool {
        match self {
            CubicReading::Statement => !cubic_solvable,
            CubicReading::Proof => cubic_solvable,
        }
    }
}
