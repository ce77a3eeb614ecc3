//! Exact arithmetic in the maximal orders of Q(sqrt(-d)).
//!
//! Elements are stored as `x + y*w` over the integral basis `{1, w}` where
//! `w = sqrt(-d)` when `-d = 1, 2 (mod 4)` and `w = (1 + sqrt(-d)) / 2` when
//! `d = 3 (mod 4)`. The five supported fields all have class number one and
//! 3 inert, so the prime above 3 is `lambda = (3)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{is_prime, kronecker, primes_up_to};

/// The values of `d` for which every operation of this crate is supported.
pub const SUPPORTED_D: [u32; 5] = [1, 7, 19, 43, 67];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("unsupported field Q(sqrt(-{0})); expected d in {{1, 7, 19, 43, 67}}")]
    UnsupportedField(u32),
    #[error("d = {0} is not a squarefree positive integer")]
    NotSquarefree(u32),
    #[error("operands live in different fields (d = {0} and d = {1})")]
    MixedFields(u32, u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue ring exponent {0} out of range 1..=4")]
    ExponentOutOfRange(u32),
    #[error("cannot parse element {0:?}; expected `x,y`")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OmegaConvention {
    /// `w = sqrt(-d)`, so `w^2 = -d`.
    Gaussian,
    /// `w = (1 + sqrt(-d)) / 2`, so `w^2 = w - (1 + d) / 4`.
    HalfTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticField {
    d: u32,
}

impl QuadraticField {
    /// One of the five supported fields.
    pub fn new(d: u32) -> Result<Self, RingError> {
        if SUPPORTED_D.contains(&d) {
            Ok(QuadraticField { d })
        } else {
            Err(RingError::UnsupportedField(d))
        }
    }

    /// An arbitrary imaginary quadratic field, used for comparisons such as
    /// the splitting of 3 in Q(sqrt(-2)) and Q(sqrt(-11)).
    pub fn ad_hoc(d: u32) -> Result<Self, RingError> {
        if d == 0 || (2..=d).any(|k| k * k <= d && d % (k * k) == 0) {
            return Err(RingError::NotSquarefree(d));
        }
        Ok(QuadraticField { d })
    }

    pub fn all() -> Vec<QuadraticField> {
        SUPPORTED_D.iter().map(|&d| QuadraticField { d }).collect()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn is_supported(&self) -> bool {
        SUPPORTED_D.contains(&self.d)
    }

    pub fn convention(&self) -> OmegaConvention {
        if self.d % 4 == 3 {
            OmegaConvention::HalfTrace
        } else {
            OmegaConvention::Gaussian
        }
    }

    pub fn disc(&self) -> i64 {
        match self.convention() {
            OmegaConvention::HalfTrace => -(self.d as i64),
            OmegaConvention::Gaussian => -4 * self.d as i64,
        }
    }

    /// `(1 + d) / 4` for the half-trace basis; unused otherwise.
    fn half_trace_const(&self) -> i64 {
        (1 + self.d as i64) / 4
    }

    pub fn unit_count(&self) -> usize {
        match self.d {
            1 => 4,
            3 => 6,
            _ => 2,
        }
    }

    /// Units in the fixed order `1, -1, w, -w, ...`.
    pub fn units(&self) -> Vec<RingElement> {
        let mut out = vec![self.element(1, 0), self.element(-1, 0)];
        match self.d {
            1 => {
                out.push(self.element(0, 1));
                out.push(self.element(0, -1));
            }
            3 => {
                out.push(self.element(0, 1));
                out.push(self.element(0, -1));
                out.push(self.element(-1, 1));
                out.push(self.element(1, -1));
            }
            _ => {}
        }
        out
    }

    pub fn element(&self, x: impl Into<BigInt>, y: impl Into<BigInt>) -> RingElement {
        RingElement {
            field: *self,
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn zero(&self) -> RingElement {
        self.element(0, 0)
    }

    pub fn one(&self) -> RingElement {
        self.element(1, 0)
    }

    pub fn omega(&self) -> RingElement {
        self.element(0, 1)
    }

    /// Parses the `x,y` element syntax shared by all command-line surfaces.
    pub fn parse_element(&self, s: &str) -> Result<RingElement, RingError> {
        let (x, y) = parse_coords(s).ok_or_else(|| RingError::Parse(s.to_string()))?;
        Ok(self.element(x, y))
    }

    /// The prime `lambda = (3)`.
    pub fn lambda(&self) -> PrimeIdeal {
        PrimeIdeal {
            residue_char: 3,
            generator: self.element(3, 0),
            norm: 9,
            split_type: SplitType::Inert,
        }
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 1 {
            write!(f, "Q(i)")
        } else {
            write!(f, "Q(sqrt(-{}))", self.d)
        }
    }
}

impl Serialize for QuadraticField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(self.d)
    }
}

/// Parses `x,y` with signed decimal integers and no whitespace.
pub fn parse_coords(s: &str) -> Option<(BigInt, BigInt)> {
    let (x, y) = s.split_once(',')?;
    Some((parse_signed(x)?, parse_signed(y)?))
}

fn parse_signed(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// `x + y*w` in the maximal order of `field`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    field: QuadraticField,
    x: BigInt,
    y: BigInt,
}

impl PartialOrd for RingElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RingElement {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field, &self.x, &self.y).cmp(&(other.field, &other.x, &other.y))
    }
}

impl RingElement {
    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    fn check_field(&self, other: &RingElement) -> Result<(), RingError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(RingError::MixedFields(self.field.d, other.field.d))
        }
    }

    pub fn try_add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_field(other)?;
        Ok(self.field.element(&self.x + &other.x, &self.y + &other.y))
    }

    pub fn try_sub(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_field(other)?;
        Ok(self.field.element(&self.x - &other.x, &self.y - &other.y))
    }

    pub fn try_mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_field(other)?;
        let xx = &self.x * &other.x;
        let yy = &self.y * &other.y;
        let cross = &self.x * &other.y + &self.y * &other.x;
        Ok(match self.field.convention() {
            OmegaConvention::Gaussian => self.field.element(xx - yy * self.field.d, cross),
            OmegaConvention::HalfTrace => {
                let c = self.field.half_trace_const();
                self.field.element(xx - &yy * c, cross + yy)
            }
        })
    }

    pub fn scale(&self, k: &BigInt) -> RingElement {
        self.field.element(&self.x * k, &self.y * k)
    }

    pub fn conj(&self) -> RingElement {
        match self.field.convention() {
            OmegaConvention::Gaussian => self.field.element(self.x.clone(), -&self.y),
            OmegaConvention::HalfTrace => self.field.element(&self.x + &self.y, -&self.y),
        }
    }

    /// `z * conj(z)`, always non-negative.
    pub fn norm(&self) -> BigInt {
        match self.field.convention() {
            OmegaConvention::Gaussian => &self.x * &self.x + &self.y * &self.y * self.field.d,
            OmegaConvention::HalfTrace => {
                &self.x * &self.x
                    + &self.x * &self.y
                    + &self.y * &self.y * self.field.half_trace_const()
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn pow(&self, mut exp: u64) -> RingElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self / other` when the quotient is integral.
    pub fn div_exact(&self, other: &RingElement) -> Option<RingElement> {
        if self.field != other.field || other.is_zero() {
            return None;
        }
        let n = other.norm();
        let t = self * &other.conj();
        if t.x.is_multiple_of(&n) && t.y.is_multiple_of(&n) {
            Some(self.field.element(&t.x / &n, &t.y / &n))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &RingElement) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn associates(&self) -> Vec<RingElement> {
        self.field.units().iter().map(|u| u * self).collect()
    }

    /// The associate smallest in `(x, y)` order among those with `x > 0`,
    /// falling back to `x = 0` when no associate has positive `x`.
    pub fn canonical_associate(&self) -> RingElement {
        let assoc = self.associates();
        let pick = |keep: &dyn Fn(&RingElement) -> bool| {
            assoc
                .iter()
                .filter(|a| keep(a))
                .min_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)))
                .cloned()
        };
        pick(&|a| a.x.is_positive())
            .or_else(|| pick(&|a| !a.x.is_negative()))
            .unwrap_or_else(|| self.clone())
    }

    /// Coordinates as `x,y`, the syntax accepted by [`QuadraticField::parse_element`].
    pub fn coords(&self) -> String {
        format!("{},{}", self.x, self.y)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = if self.field.d == 1 { "i" } else { "w" };
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "{}*{}", self.y, w),
            (false, false) if self.y.is_negative() => {
                write!(f, "{} - {}*{}", self.x, -&self.y, w)
            }
            (false, false) => write!(f, "{} + {}*{}", self.x, self.y, w),
        }
    }
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.coords())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a RingElement> for &'a RingElement {
            type Output = RingElement;
            /// Panics when the operands live in different fields; use the
            /// `try_` methods to get an error instead.
            fn $method(self, rhs: &'a RingElement) -> RingElement {
                self.$checked(rhs).expect("ring elements from different fields")
            }
        }

        impl $trait for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.field.element(-&self.x, -&self.y)
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

/// A valuation, with zero mapped to a distinguished infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> u64 {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Valuation at `lambda = (3)`: since 3 is inert and `{1, w}` is an integral
/// basis, this is the 3-adic valuation of the coordinate gcd.
pub fn val_lambda(z: &RingElement) -> Valuation {
    if z.is_zero() {
        return Valuation::Infinite;
    }
    let three = BigInt::from(3);
    let vx = if z.x.is_zero() { u64::MAX } else { int_valuation(&z.x, &three) };
    let vy = if z.y.is_zero() { u64::MAX } else { int_valuation(&z.y, &three) };
    Valuation::Finite(vx.min(vy))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        };
        f.write_str(s)
    }
}

pub fn splitting_type(field: QuadraticField, p: u64) -> Result<SplitType, RingError> {
    if !is_prime(p) {
        return Err(RingError::NotPrime(p));
    }
    Ok(match kronecker(field.disc(), p) {
        0 => SplitType::Ramified,
        1 => SplitType::Split,
        _ => SplitType::Inert,
    })
}

/// A (principal) prime ideal together with a canonical generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeIdeal {
    pub residue_char: u64,
    pub generator: RingElement,
    pub norm: u64,
    pub split_type: SplitType,
}

impl PrimeIdeal {
    pub fn field(&self) -> QuadraticField {
        self.generator.field()
    }

    pub fn is_lambda(&self) -> bool {
        self.residue_char == 3 && self.field().is_supported()
    }

    /// Recognises `z` as a generator of a prime ideal, returning the ideal
    /// with its canonical generator.
    pub fn from_generator(z: &RingElement) -> Option<PrimeIdeal> {
        let field = z.field();
        let norm = z.norm().to_u64()?;
        if is_prime(norm) {
            let split_type = splitting_type(field, norm).ok()?;
            return Some(PrimeIdeal {
                residue_char: norm,
                generator: z.canonical_associate(),
                norm,
                split_type,
            });
        }
        let p = crate::arith::isqrt(norm);
        if p * p == norm && is_prime(p) && splitting_type(field, p).ok()? == SplitType::Inert {
            let rational = field.element(p, 0);
            if z.canonical_associate() == rational {
                return Some(PrimeIdeal {
                    residue_char: p,
                    generator: rational,
                    norm,
                    split_type: SplitType::Inert,
                });
            }
        }
        None
    }

    fn sort_key(&self) -> (u64, &BigInt, &BigInt) {
        (self.norm, self.generator.x(), self.generator.y())
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

/// `v_q(z)` by repeated exact division by the generator of `q`.
pub fn valuation_at(z: &RingElement, q: &PrimeIdeal) -> Valuation {
    if z.is_zero() {
        return Valuation::Infinite;
    }
    if q.split_type == SplitType::Inert {
        let p = BigInt::from(q.residue_char);
        let vx = if z.x.is_zero() { u64::MAX } else { int_valuation(&z.x, &p) };
        let vy = if z.y.is_zero() { u64::MAX } else { int_valuation(&z.y, &p) };
        return Valuation::Finite(vx.min(vy));
    }
    let mut v = 0;
    let mut cur = z.clone();
    while let Some(next) = cur.div_exact(&q.generator) {
        cur = next;
        v += 1;
    }
    Valuation::Finite(v)
}

/// All prime ideals of norm at most `bound`, ordered by `(norm, x, y)` of the
/// canonical generator.
pub fn primes_up_to_norm(field: QuadraticField, bound: u64) -> Vec<PrimeIdeal> {
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        let split_type = splitting_type(field, p).expect("sieved prime");
        match split_type {
            SplitType::Inert => {
                if p * p <= bound {
                    out.push(PrimeIdeal {
                        residue_char: p,
                        generator: field.element(p, 0),
                        norm: p * p,
                        split_type,
                    });
                }
            }
            SplitType::Split | SplitType::Ramified => {
                for generator in elements_of_norm(field, p) {
                    out.push(PrimeIdeal {
                        residue_char: p,
                        generator,
                        norm: p,
                        split_type,
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

/// Canonical generators of the distinct ideals of prime norm `p`, found by
/// exhaustive search over `|x|, |y| <= p`.
fn elements_of_norm(field: QuadraticField, p: u64) -> Vec<RingElement> {
    let target = BigInt::from(p);
    let bound = p as i64;
    let mut found: Vec<RingElement> = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            let z = field.element(x, y);
            if z.norm() == target {
                let c = z.canonical_associate();
                if !found.contains(&c) {
                    found.push(c);
                }
            }
        }
    }
    found.sort();
    found
}

/// An element of `O_K / 3^m`, stored with reduced coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    pub x: i64,
    pub y: i64,
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl Serialize for Residue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The finite ring `O_K / 3^m`, `1 <= m <= 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    field: QuadraticField,
    m: u32,
    modulus: i64,
}

pub fn residue_ring(field: QuadraticField, m: u32) -> Result<ResidueRing, RingError> {
    if !(1..=4).contains(&m) {
        return Err(RingError::ExponentOutOfRange(m));
    }
    Ok(ResidueRing {
        field,
        m,
        modulus: 3i64.pow(m),
    })
}

impl ResidueRing {
    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn cardinality(&self) -> u64 {
        (self.modulus * self.modulus) as u64
    }

    pub fn residue(&self, x: i64, y: i64) -> Residue {
        Residue {
            x: x.rem_euclid(self.modulus),
            y: y.rem_euclid(self.modulus),
        }
    }

    pub fn reduce(&self, z: &RingElement) -> Residue {
        let m = BigInt::from(self.modulus);
        let x = z.x.mod_floor(&m).to_i64().expect("reduced");
        let y = z.y.mod_floor(&m).to_i64().expect("reduced");
        Residue { x, y }
    }

    pub fn elements(&self) -> impl Iterator<Item = Residue> + '_ {
        (0..self.modulus).flat_map(move |x| (0..self.modulus).map(move |y| Residue { x, y }))
    }

    pub fn zero(&self) -> Residue {
        Residue { x: 0, y: 0 }
    }

    pub fn one(&self) -> Residue {
        self.residue(1, 0)
    }

    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        self.residue(a.x + b.x, a.y + b.y)
    }

    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        let xx = a.x * b.x;
        let yy = a.y * b.y;
        let cross = a.x * b.y + a.y * b.x;
        match self.field.convention() {
            OmegaConvention::Gaussian => self.residue(xx - yy * self.field.d as i64, cross),
            OmegaConvention::HalfTrace => {
                self.residue(xx - yy * self.field.half_trace_const(), cross + yy)
            }
        }
    }

    pub fn scale(&self, k: i64, a: Residue) -> Residue {
        self.residue(k * a.x, k * a.y)
    }

    pub fn pow(&self, a: Residue, mut exp: u64) -> Residue {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Units are exactly the residues not divisible by `lambda`.
    pub fn is_unit(&self, a: Residue) -> bool {
        a.x % 3 != 0 || a.y % 3 != 0
    }

    pub fn units(&self) -> Vec<Residue> {
        self.elements().filter(|&a| self.is_unit(a)).collect()
    }
}

/// The image of `O_K^x` in `(O_K / 3^m)^x`, sorted.
pub fn unit_image_mod(field: QuadraticField, m: u32) -> Result<Vec<Residue>, RingError> {
    let ring = residue_ring(field, m)?;
    let mut image: Vec<Residue> = field.units().iter().map(|u| ring.reduce(u)).collect();
    image.sort();
    image.dedup();
    Ok(image)
}

/// An element of a residue field `O_K / q`, as coordinates modulo the
/// residue characteristic (`y = 0` when the residue degree is one).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq {
    pub x: u64,
    pub y: u64,
}

/// The finite field `O_K / q` for a prime ideal `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    field: QuadraticField,
    p: u64,
    /// `Some(r)` when `w = r (mod q)` and the field is the prime field `F_p`.
    omega_root: Option<u64>,
}

impl ResidueField {
    pub fn new(q: &PrimeIdeal) -> ResidueField {
        let field = q.field();
        let p = q.residue_char;
        let omega_root = match q.split_type {
            SplitType::Inert => None,
            SplitType::Split | SplitType::Ramified => Some(
                (0..p)
                    .find(|&r| q.generator.divides(&field.element(-(r as i64), 1)))
                    .expect("w reduces to some residue modulo a degree-one prime"),
            ),
        };
        ResidueField { field, p, omega_root }
    }

    pub fn order(&self) -> u64 {
        match self.omega_root {
            Some(_) => self.p,
            None => self.p * self.p,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    fn norm_mod(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    pub fn reduce(&self, z: &RingElement) -> Fq {
        let pb = BigInt::from(self.p);
        let x = z.x.mod_floor(&pb).to_u64().expect("reduced");
        let y = z.y.mod_floor(&pb).to_u64().expect("reduced");
        match self.omega_root {
            Some(r) => Fq {
                x: self.norm_mod(x as i128 + y as i128 * r as i128),
                y: 0,
            },
            None => Fq { x, y },
        }
    }

    pub fn elements(&self) -> Vec<Fq> {
        let ys = if self.omega_root.is_some() { 1 } else { self.p };
        (0..self.p)
            .flat_map(|x| (0..ys).map(move |y| Fq { x, y }))
            .collect()
    }

    pub fn zero(&self) -> Fq {
        Fq { x: 0, y: 0 }
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        Fq {
            x: (a.x + b.x) % self.p,
            y: (a.y + b.y) % self.p,
        }
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let (ax, ay, bx, by) = (a.x as i128, a.y as i128, b.x as i128, b.y as i128);
        let xx = ax * bx;
        let yy = ay * by;
        let cross = ax * by + ay * bx;
        let d = self.field.d as i128;
        match (self.omega_root, self.field.convention()) {
            (Some(_), _) => Fq { x: self.norm_mod(xx), y: 0 },
            (None, OmegaConvention::Gaussian) => Fq {
                x: self.norm_mod(xx - yy * d),
                y: self.norm_mod(cross),
            },
            (None, OmegaConvention::HalfTrace) => Fq {
                x: self.norm_mod(xx - yy * ((1 + d) / 4)),
                y: self.norm_mod(cross + yy),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(d: u32) -> QuadraticField {
        QuadraticField::new(d).unwrap()
    }

    #[test]
    fn field_descriptors() {
        assert_eq!(f(1).disc(), -4);
        for d in [7, 19, 43, 67] {
            assert_eq!(f(d).disc(), -(d as i64));
            assert_eq!(f(d).convention(), OmegaConvention::HalfTrace);
            assert_eq!(f(d).unit_count(), 2);
        }
        assert_eq!(f(1).unit_count(), 4);
        assert!(QuadraticField::new(2).is_err());
        assert!(QuadraticField::ad_hoc(12).is_err());
        assert_eq!(QuadraticField::ad_hoc(2).unwrap().disc(), -8);
    }

    #[test]
    fn element_arith_examples() {
        let k = f(1);
        let z = k.element(1, 1);
        let w = k.element(1, -1);
        assert_eq!(&z * &w, k.element(2, 0));
        let k7 = f(7);
        assert_eq!(&k7.omega() * &k7.omega(), k7.element(-2, 1));
        assert_eq!(&z + &k.zero(), z);
        assert_eq!(
            z.try_add(&k7.one()),
            Err(RingError::MixedFields(1, 7))
        );
    }

    #[test]
    fn norm_examples() {
        assert_eq!(f(1).element(2, 1).norm(), BigInt::from(5));
        assert_eq!(f(7).element(0, 1).norm(), BigInt::from(2));
        for d in SUPPORTED_D {
            assert_eq!(f(d).element(3, 0).norm(), BigInt::from(9));
        }
    }

    #[test]
    fn val_lambda_examples() {
        let k = f(19);
        assert_eq!(val_lambda(&k.element(9, 18)), Valuation::Finite(2));
        assert_eq!(val_lambda(&k.element(3, 1)), Valuation::Finite(0));
        assert_eq!(val_lambda(&k.zero()), Valuation::Infinite);
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(splitting_type(f(1), 3), Ok(SplitType::Inert));
        assert_eq!(splitting_type(f(1), 5), Ok(SplitType::Split));
        assert_eq!(splitting_type(f(7), 7), Ok(SplitType::Ramified));
        assert_eq!(splitting_type(f(7), 9), Err(RingError::NotPrime(9)));
        for d in SUPPORTED_D {
            assert_eq!(splitting_type(f(d), 3), Ok(SplitType::Inert));
        }
        for d in [2, 11] {
            let k = QuadraticField::ad_hoc(d).unwrap();
            assert_eq!(splitting_type(k, 3), Ok(SplitType::Split));
        }
    }

    #[test]
    fn primes_up_to_norm_examples() {
        let gens: Vec<(u64, String)> = primes_up_to_norm(f(1), 5)
            .iter()
            .map(|q| (q.norm, q.generator.coords()))
            .collect();
        // (1+i), (2+i) and (2-i) under canonical associates.
        assert_eq!(
            gens,
            vec![(2, "1,-1".into()), (5, "1,-2".into()), (5, "1,2".into())]
        );
        let k = f(1);
        let ps = primes_up_to_norm(k, 5);
        assert!(ps[1].generator.divides(&k.element(2, 1)) ^ ps[2].generator.divides(&k.element(2, 1)));

        let ps7 = primes_up_to_norm(f(7), 2);
        assert_eq!(ps7.len(), 2);
        let k7 = f(7);
        let w = k7.omega();
        let wbar = w.conj();
        assert!(ps7.iter().any(|q| q.generator.canonical_associate() == w.canonical_associate()));
        assert!(ps7.iter().any(|q| q.generator.canonical_associate() == wbar.canonical_associate()));

        assert!(primes_up_to_norm(f(19), 3).is_empty());
    }

    #[test]
    fn prime_generators_have_declared_norms() {
        for k in QuadraticField::all() {
            for q in primes_up_to_norm(k, 200) {
                assert_eq!(q.generator.norm(), BigInt::from(q.norm));
                assert!(!q.generator.is_unit());
                assert_eq!(PrimeIdeal::from_generator(&q.generator).as_ref(), Some(&q));
            }
        }
    }

    #[test]
    fn residue_ring_examples() {
        let r = residue_ring(f(1), 1).unwrap();
        assert_eq!(r.cardinality(), 9);
        assert_eq!(r.units().len(), 8);
        assert_eq!(residue_ring(f(43), 2).unwrap().cardinality(), 81);
        assert_eq!(residue_ring(f(1), 0), Err(RingError::ExponentOutOfRange(0)));
        assert_eq!(residue_ring(f(1), 5), Err(RingError::ExponentOutOfRange(5)));
        for k in QuadraticField::all() {
            for m in 1..=4 {
                let r = residue_ring(k, m).unwrap();
                assert_eq!(r.units().len() as u64, 8 * 9u64.pow(m - 1));
            }
        }
    }

    #[test]
    fn residue_mul_matches_ring_mul() {
        for k in QuadraticField::all() {
            let r = residue_ring(k, 2).unwrap();
            for (a, b) in [((2, 5), (-7, 3)), ((11, -4), (6, 13))] {
                let za = k.element(a.0, a.1);
                let zb = k.element(b.0, b.1);
                assert_eq!(r.mul(r.reduce(&za), r.reduce(&zb)), r.reduce(&(&za * &zb)));
            }
        }
    }

    #[test]
    fn unit_image_examples() {
        let img = unit_image_mod(f(1), 1).unwrap();
        let r = residue_ring(f(1), 1).unwrap();
        let mut expected = vec![r.residue(1, 0), r.residue(-1, 0), r.residue(0, 1), r.residue(0, -1)];
        expected.sort();
        assert_eq!(img, expected);
        let img7 = unit_image_mod(f(7), 1).unwrap();
        assert_eq!(img7.len(), 2);
        assert_eq!(8 % img7.len(), 0);
    }

    #[test]
    fn residue_fields_are_fields() {
        for k in QuadraticField::all() {
            for q in primes_up_to_norm(k, 50) {
                let fq = ResidueField::new(&q);
                assert_eq!(fq.order(), q.norm);
                assert_eq!(fq.elements().len() as u64, q.norm);
                // reduction is a ring map and kills the generator
                assert_eq!(fq.reduce(&q.generator), fq.zero());
                let (a, b) = (k.element(5, -3), k.element(-2, 7));
                assert_eq!(fq.mul(fq.reduce(&a), fq.reduce(&b)), fq.reduce(&(&a * &b)));
                assert_eq!(fq.add(fq.reduce(&a), fq.reduce(&b)), fq.reduce(&(&a + &b)));
                // no zero divisors
                let nonzero: Vec<Fq> = fq.elements().into_iter().filter(|&e| e != fq.zero()).collect();
                for &u in nonzero.iter().take(12) {
                    assert!(nonzero.iter().all(|&v| fq.mul(u, v) != fq.zero()));
                }
            }
        }
    }

    #[test]
    fn element_syntax() {
        let k = f(7);
        assert_eq!(k.parse_element("-3,12").unwrap(), k.element(-3, 12));
        for bad in ["", "1", "1,", ",1", "1, 2", "a,b", "1,2,3", "--1,2"] {
            assert!(k.parse_element(bad).is_err(), "{bad:?}");
        }
    }
}
