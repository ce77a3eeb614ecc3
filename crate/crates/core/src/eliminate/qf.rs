//! The Hecke eigenvalue field `Q_f = Q[x] / (f)` in power-basis coordinates.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::factorize_u64;
use crate::bounds::resultant;
use crate::poly::IntPoly;

/// An element of `Q_f`, stored as `deg f` rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QfElement {
    coords: Vec<BigRational>,
}

impl QfElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Rational value when only the constant coordinate is nonzero.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords.iter().skip(1).all(Zero::is_zero) {
            Some(self.coords.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }
}

impl fmt::Display for QfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    /// Degree above 4, or coefficients too large for the divisor search.
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientField {
    poly: IntPoly,
}

impl CoefficientField {
    /// `None` for constant or zero polynomials.
    pub fn new(poly: IntPoly) -> Option<Self> {
        match poly.degree() {
            Some(d) if d >= 1 => Some(CoefficientField { poly }),
            _ => None,
        }
    }

    /// `Q` itself, defined by `x`.
    pub fn rationals() -> Self {
        CoefficientField { poly: IntPoly::x() }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("nonconstant")
    }

    /// Builds an element from at most `deg f` coordinates.
    pub fn element(&self, mut coords: Vec<BigRational>) -> Option<QfElement> {
        if coords.len() > self.degree() {
            return None;
        }
        coords.resize(self.degree(), BigRational::zero());
        Some(QfElement { coords })
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> QfElement {
        self.from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_rational(&self, r: BigRational) -> QfElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[0] = r;
        QfElement { coords }
    }

    pub fn add(&self, a: &QfElement, b: &QfElement) -> QfElement {
        QfElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &QfElement, b: &QfElement) -> QfElement {
        QfElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn mul(&self, a: &QfElement, b: &QfElement) -> QfElement {
        let n = self.degree();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(prod)
    }

    /// Reduces a rational polynomial modulo `f`.
    fn reduce(&self, mut c: Vec<BigRational>) -> QfElement {
        let n = self.degree();
        let f: Vec<BigRational> = self
            .poly
            .coeffs()
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let lead = f[n].clone();
        for k in (n..c.len()).rev() {
            if c[k].is_zero() {
                continue;
            }
            let t = &c[k] / &lead;
            for (i, fi) in f.iter().enumerate() {
                c[k - n + i] -= &t * fi;
            }
        }
        c.truncate(n);
        c.resize(n, BigRational::zero());
        QfElement { coords: c }
    }

    /// `Norm_{Q_f/Q}(z) = Res(f, Z) / lead(f)^deg(Z)` with `Z` the polynomial
    /// representative of `z`.
    pub fn norm(&self, z: &QfElement) -> BigRational {
        let denom = z
            .coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled = IntPoly::new(
            z.coords
                .iter()
                .map(|c| (c * BigRational::from_integer(denom.clone())).to_integer())
                .collect(),
        );
        let Some(deg_z) = scaled.degree() else {
            return BigRational::zero();
        };
        let res = resultant(&self.poly, &scaled).expect("both polynomials nonzero");
        let lead_pow = num_traits::pow(self.poly.lead(), deg_z);
        let denom_pow = num_traits::pow(denom, self.degree());
        BigRational::new(res, lead_pow * denom_pow)
    }

    /// Complex roots of `f`, by Durand-Kerner iteration.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        let lead = self.poly.lead().to_f64().unwrap_or(f64::NAN);
        let monic: Vec<f64> = self
            .poly
            .coeffs()
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN) / lead)
            .collect();
        if n == 1 {
            return vec![Complex64::new(-monic[0], 0.0)];
        }
        let eval = |z: Complex64| monic.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c);
        let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
        for _ in 0..2000 {
            let mut delta = 0.0f64;
            for i in 0..n {
                let denom = (0..n)
                    .filter(|&j| j != i)
                    .fold(Complex64::one(), |acc, j| acc * (roots[i] - roots[j]));
                let step = eval(roots[i]) / denom;
                roots[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-15 {
                break;
            }
        }
        roots
    }

    /// Images of `z` under every complex embedding.
    pub fn embeddings(&self, z: &QfElement) -> Vec<Complex64> {
        let coords: Vec<f64> = z.coords.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        self.complex_roots()
            .into_iter()
            .map(|r| coords.iter().rev().fold(Complex64::zero(), |acc, &c| acc * r + c))
            .collect()
    }

    /// Irreducibility over `Q` for degree at most 4: rational roots, then
    /// quadratic factors by Kronecker's interpolation method.
    pub fn irreducibility(&self) -> Irreducibility {
        let n = self.degree();
        if n == 1 {
            return Irreducibility::Irreducible;
        }
        if n > 4 {
            return Irreducibility::Unchecked;
        }
        let f = &self.poly;
        if f.coeff(0).is_zero() {
            return Irreducibility::Reducible;
        }
        let (Some(c0), Some(lead)) = (divisors(&f.coeff(0)), divisors(&f.lead())) else {
            return Irreducibility::Unchecked;
        };
        for p in &c0 {
            for q in &lead {
                for sign in [1i64, -1] {
                    // f(p/q) = 0  <=>  sum c_i p^i q^(n-i) = 0
                    let num = BigInt::from(sign) * BigInt::from(*p);
                    let den = BigInt::from(*q);
                    let val = f.coeffs().iter().enumerate().fold(BigInt::zero(), |acc, (i, c)| {
                        acc + c * num_traits::pow(num.clone(), i) * num_traits::pow(den.clone(), n - i)
                    });
                    if val.is_zero() {
                        return Irreducibility::Reducible;
                    }
                }
            }
        }
        if n < 4 {
            return Irreducibility::Irreducible;
        }
        let at = |x: i64| f.eval(&BigInt::from(x));
        let (Some(d0), Some(d1), Some(dm1)) = (divisors(&at(0)), divisors(&at(1)), divisors(&at(-1)))
        else {
            return Irreducibility::Unchecked;
        };
        let signed = |ds: &[u64]| -> Vec<i64> {
            ds.iter().flat_map(|&d| [d as i64, -(d as i64)]).collect()
        };
        for &u in &signed(&d0) {
            for &v in &signed(&d1) {
                for &w in &signed(&dm1) {
                    // g(0) = u, g(1) = v, g(-1) = w
                    let two_a = v + w - 2 * u;
                    let two_b = v - w;
                    if two_a == 0 || two_a % 2 != 0 || two_b % 2 != 0 {
                        continue;
                    }
                    let g = IntPoly::from_i64(&[u, two_b / 2, two_a / 2]);
                    if divides_over_q(&g, f) {
                        return Irreducibility::Reducible;
                    }
                }
            }
        }
        Irreducibility::Irreducible
    }
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let m = n.abs().to_u64()?;
    if m == 0 || m > 1_000_000_000_000 {
        return None;
    }
    let mut ds = vec![1u64];
    for (p, e) in factorize_u64(m) {
        let prev = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(prev.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    Some(ds)
}

/// Whether `g` divides `f` in `Q[x]`.
fn divides_over_q(g: &IntPoly, f: &IntPoly) -> bool {
    let (Some(dg), Some(df)) = (g.degree(), f.degree()) else {
        return false;
    };
    if dg > df {
        return false;
    }
    let mut r: Vec<BigRational> = f
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let lead = BigRational::from_integer(g.lead());
    for k in (dg..=df).rev() {
        if r[k].is_zero() {
            continue;
        }
        let t = &r[k] / &lead;
        for (i, gi) in g.coeffs().iter().enumerate() {
            r[k - dg + i] -= &t * BigRational::from_integer(gi.clone());
        }
    }
    r.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn norm_examples() {
        let rat = CoefficientField::rationals();
        assert_eq!(rat.norm(&rat.from_int(7)), q(7));
        let sqrt2 = CoefficientField::new(IntPoly::from_i64(&[-2, 0, 1])).unwrap();
        let x = sqrt2.element(vec![q(0), q(1)]).unwrap();
        assert_eq!(sqrt2.norm(&x), q(-2));
        let one_plus_x = sqrt2.element(vec![q(1), q(1)]).unwrap();
        assert_eq!(sqrt2.norm(&one_plus_x), q(-1));
        assert_eq!(sqrt2.norm(&sqrt2.from_int(0)), q(0));
        assert_eq!(sqrt2.norm(&sqrt2.from_int(3)), q(9));
        let half = sqrt2.element(vec![BigRational::new(1.into(), 2.into()), q(0)]).unwrap();
        assert_eq!(sqrt2.norm(&half), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn non_monic_field_norm() {
        // 2x^2 - 1 has roots +-1/sqrt(2); Norm(x) = -1/2.
        let f = CoefficientField::new(IntPoly::from_i64(&[-1, 0, 2])).unwrap();
        let x = f.element(vec![q(0), q(1)]).unwrap();
        assert_eq!(f.norm(&x), BigRational::new((-1).into(), 2.into()));
        // x * x reduces to 1/2
        assert_eq!(f.mul(&x, &x), f.from_rational(BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn multiplication_reduces() {
        let f = CoefficientField::new(IntPoly::from_i64(&[-2, 0, 1])).unwrap();
        let x = f.element(vec![q(0), q(1)]).unwrap();
        assert_eq!(f.mul(&x, &x), f.from_int(2));
        let a = f.element(vec![q(1), q(1)]).unwrap();
        let b = f.element(vec![q(1), q(-1)]).unwrap();
        assert_eq!(f.mul(&a, &b), f.from_int(-1));
        assert!(f.element(vec![q(1), q(2), q(3)]).is_none());
    }

    #[test]
    fn embeddings_of_sqrt5() {
        let f = CoefficientField::new(IntPoly::from_i64(&[-5, 0, 1])).unwrap();
        let x = f.element(vec![q(0), q(1)]).unwrap();
        let mut e: Vec<f64> = f.embeddings(&x).iter().map(|z| z.re).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((e[0] + 5f64.sqrt()).abs() < 1e-9);
        assert!((e[1] - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn irreducibility_checks() {
        let cf = |c: &[i64]| CoefficientField::new(IntPoly::from_i64(c)).unwrap();
        assert_eq!(cf(&[-2, 0, 1]).irreducibility(), Irreducibility::Irreducible);
        assert_eq!(cf(&[-4, 0, 1]).irreducibility(), Irreducibility::Reducible);
        assert_eq!(cf(&[-1, 0, 2]).irreducibility(), Irreducibility::Irreducible);
        assert_eq!(cf(&[-2, 0, 0, 1]).irreducibility(), Irreducibility::Irreducible);
        // (x^2 + 1)(x^2 + 2) has no rational root but factors
        assert_eq!(cf(&[2, 0, 3, 0, 1]).irreducibility(), Irreducibility::Reducible);
        assert_eq!(cf(&[2, 0, -4, 0, 1]).irreducibility(), Irreducibility::Irreducible);
        assert_eq!(cf(&[1, 0, 0, 0, 0, 1]).irreducibility(), Irreducibility::Unchecked);
    }
}
