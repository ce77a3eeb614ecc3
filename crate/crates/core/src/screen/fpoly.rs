//! Dense polynomials over F_p (p < 2^32), coefficients low to high.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::{mul_mod, pow_mod};
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn reduce(f: &IntPoly, p: u64) -> Self {
        let m = BigInt::from(p);
        let c = f
            .coeffs()
            .iter()
            .map(|a| a.mod_floor(&m).to_u64().expect("reduced below p"))
            .collect();
        Self::new(p, c)
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }

    pub fn lift(&self) -> IntPoly {
        IntPoly::new(self.c.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| (self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0)) % self.p)
            .collect();
        Self::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| (self.c.get(i).unwrap_or(&0) + self.p - o.c.get(i).unwrap_or(&0)) % self.p)
            .collect();
        Self::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, c)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.inv(self.lead());
        Self::new(self.p, self.c.iter().map(|&a| mul_mod(a, inv, self.p)).collect())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = self.inv(d.lead());
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::new(self.p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + dd], inv, self.p);
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                r[k + j] = (r[k + j] + self.p - mul_mod(coef, b, self.p)) % self.p;
            }
        }
        r.truncate(dd);
        (Self::new(self.p, q), Self::new(self.p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p))
            .collect();
        Self::new(self.p, c)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.p), |acc, _| acc.mul(self))
    }

    /// `g` with `g^p = self`, valid when the derivative vanishes.
    fn pth_root(&self) -> Self {
        let c = self.c.iter().step_by(self.p as usize).copied().collect();
        Self::new(self.p, c)
    }

    /// Squarefree decomposition: pairs `(a_i, i)` with `self = lc * prod a_i^i`,
    /// each `a_i` monic squarefree and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(FpPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        self.monic().sff_into(1, &mut out);
        let mut merged: Vec<(FpPoly, u32)> = Vec::new();
        out.sort_by_key(|(_, m)| *m);
        for (f, m) in out {
            match merged.last_mut() {
                Some((g, n)) if *n == m => *g = g.mul(&f),
                _ => merged.push((f, m)),
            }
        }
        merged
    }

    fn sff_into(&self, scale: u32, out: &mut Vec<(FpPoly, u32)>) {
        let d = self.derivative();
        if d.is_zero() {
            self.pth_root().sff_into(scale * self.p as u32, out);
            return;
        }
        let mut c = self.gcd(&d);
        let mut w = self.div_rem(&c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_rem(&y).0;
            if fac.degree().unwrap_or(0) > 0 {
                out.push((fac.monic(), i * scale));
            }
            i += 1;
            w = y;
            c = c.div_rem(&w).0;
        }
        if !c.is_one() {
            c.pth_root().monic().sff_into(scale * self.p as u32, out);
        }
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// `(i, product of all irreducible factors of degree i)`.
    pub fn distinct_degree(&self) -> Vec<(usize, FpPoly)> {
        let mut out = Vec::new();
        let mut f = self.monic();
        let x = Self::x(self.p);
        let mut h = x.clone();
        let mut i = 0;
        while f.degree().unwrap_or(0) >= 2 * (i + 1) {
            i += 1;
            h = h.pow_mod(self.p, &f);
            let g = f.gcd(&h.sub(&x));
            if !g.is_one() {
                f = f.div_rem(&g).0;
                h = h.rem(&f);
                out.push((i, g));
            }
        }
        if let Some(d) = f.degree().filter(|&d| d > 0) {
            out.push((d, f));
        }
        out
    }

    /// Residue degrees and multiplicities of the irreducible factors, sorted.
    pub fn factor_shape(&self) -> Vec<(usize, u32)> {
        let mut shape = Vec::new();
        for (a, m) in self.squarefree_decomposition() {
            for (deg, g) in a.distinct_degree() {
                let count = g.degree().unwrap_or(0) / deg;
                shape.extend(std::iter::repeat((deg, m)).take(count));
            }
        }
        shape.sort();
        shape
    }

    /// Product of `a_i^(e)` for a squarefree decomposition.
    pub fn expand(p: u64, parts: &[(FpPoly, u32)]) -> Self {
        parts.iter().fold(Self::one(p), |acc, (a, e)| acc.mul(&a.pow(*e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    #[test]
    fn division_identity() {
        let a = fp(7, &[3, 1, 4, 1, 5, 2]);
        let b = fp(7, &[2, 0, 3]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let common = fp(5, &[1, 1]);
        let a = common.mul(&fp(5, &[2, 0, 1]));
        let b = common.mul(&fp(5, &[3, 1]));
        assert_eq!(a.gcd(&b), common);
    }

    #[test]
    fn squarefree_handles_pth_powers() {
        // x^4 over F_2 and (x+1)^2 (x^2+x+1)^3 over F_2.
        let x4 = fp(2, &[0, 0, 0, 0, 1]);
        assert_eq!(x4.squarefree_decomposition(), vec![(fp(2, &[0, 1]), 4)]);
        let f = fp(2, &[1, 1]).pow(2).mul(&fp(2, &[1, 1, 1]).pow(3));
        let sff = f.squarefree_decomposition();
        assert_eq!(FpPoly::expand(2, &sff), f);
        assert_eq!(f.factor_shape(), vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn shapes() {
        // x^2 + 1 mod 3 irreducible; x^2 + 2 = (x - 1)(x + 1) mod 3.
        assert_eq!(fp(3, &[1, 0, 1]).factor_shape(), vec![(2, 1)]);
        assert_eq!(fp(3, &[2, 0, 1]).factor_shape(), vec![(1, 1), (1, 1)]);
        // x^5 - x over F_5 splits completely.
        assert_eq!(fp(5, &[0, 4, 0, 0, 0, 1]).factor_shape(), vec![(1, 1); 5]);
        // x^4 + x + 1 over F_2 is irreducible.
        assert_eq!(fp(2, &[1, 1, 0, 0, 1]).factor_shape(), vec![(4, 1)]);
        // x^9 - x over F_3: 3 linear + 3 irreducible quadratics.
        let f = fp(3, &[0, 2, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(f.factor_shape(), vec![(1, 1), (1, 1), (1, 1), (2, 1), (2, 1), (2, 1)]);
    }

    #[test]
    fn reduce_negative_coefficients() {
        let f = IntPoly::from_i64(&[-1, 0, 1]);
        assert_eq!(FpPoly::reduce(&f, 3), fp(3, &[2, 0, 1]));
    }
}
