//! Truncated Laurent series over a prime field GF(p).
//!
//! A [`Series`] is known to an absolute precision `prec`: every coefficient at
//! an exponent below `prec` is determined, nothing at or above it is.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps coefficient products inside `u32`.
pub const MAX_MODULUS: u32 = 1 << 16;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_modulus(p: u32) -> Result<()> {
    if p >= MAX_MODULUS || !is_prime(p) {
        return Err(Error::BadModulus(p));
    }
    Ok(())
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// An element of GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u32,
    p: u32,
}

impl FieldElem {
    pub fn new(value: i64, p: u32) -> Self {
        let v = value.rem_euclid(p as i64) as u32;
        FieldElem { value: v, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, e: u64) -> Self {
        FieldElem {
            value: pow_mod(self.value as u64, e, self.p as u64) as u32,
            p: self.p,
        }
    }

    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.p as u64 - 2))
        }
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn signed(self) -> i64 {
        let v = self.value as i64;
        if v > self.p as i64 / 2 {
            v - self.p as i64
        } else {
            v
        }
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        FieldElem {
            value: (self.value + o.value) % self.p,
            p: self.p,
        }
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: FieldElem) -> FieldElem {
        FieldElem {
            value: (self.value + self.p - o.value) % self.p,
            p: self.p,
        }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        FieldElem {
            value: ((self.value as u64 * o.value as u64) % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            value: (self.p - self.value) % self.p,
            p: self.p,
        }
    }
}

/// Valuation of a truncated series: exact, or only bounded below by the precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(i32),
    AtLeast(i32),
}

impl Valuation {
    pub fn exact(self) -> Option<i32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound valid in both cases.
    pub fn lower_bound(self) -> i32 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Laurent series over GF(p) known below an absolute precision.
///
/// Coefficients are stored densely from the valuation up to `prec`; a series
/// that vanishes to precision stores nothing and has `start == prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    p: u32,
    start: i32,
    coeffs: Vec<u32>,
    prec: i32,
}

impl Series {
    pub fn zero(p: u32, prec: i32) -> Self {
        Series {
            p,
            start: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn one(p: u32, prec: i32) -> Self {
        Series::monomial(p, 1, 0, prec)
    }

    /// `c * t^k`, known below `prec`.
    pub fn monomial(p: u32, c: i64, k: i32, prec: i32) -> Self {
        Series::from_terms_unchecked(p, &[(k, c)], prec)
    }

    /// Builds a series from `(exponent, coefficient)` pairs.
    ///
    /// Terms at or above `prec` are rejected.
    pub fn from_terms(p: u32, terms: &[(i32, i64)], prec: i32) -> Result<Self> {
        check_modulus(p)?;
        if let Some(&(e, _)) = terms
            .iter()
            .find(|&&(e, c)| e >= prec && c.rem_euclid(p as i64) != 0)
        {
            return Err(Error::Parse(format!(
                "term t^{e} lies at or above prec={prec}"
            )));
        }
        Ok(Series::from_terms_unchecked(p, terms, prec))
    }

    /// Same as [`Series::from_terms`] but silently drops terms at or above `prec`.
    pub fn from_terms_unchecked(p: u32, terms: &[(i32, i64)], prec: i32) -> Self {
        let lo = terms.iter().map(|t| t.0).filter(|&e| e < prec).min();
        let Some(lo) = lo else {
            return Series::zero(p, prec);
        };
        let mut coeffs = vec![0u32; (prec - lo) as usize];
        for &(e, c) in terms {
            if e < prec {
                let slot = &mut coeffs[(e - lo) as usize];
                *slot = ((*slot as i64 + c).rem_euclid(p as i64)) as u32;
            }
        }
        Series {
            p,
            start: lo,
            coeffs,
            prec,
        }
        .normalized()
    }

    /// Builds a series from dense coefficients starting at exponent `start`.
    pub fn from_dense(p: u32, start: i32, coeffs: Vec<u32>, prec: i32) -> Self {
        debug_assert_eq!(start + coeffs.len() as i32, prec);
        Series {
            p,
            start,
            coeffs,
            prec,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().position(|&c| c != 0);
        match lead {
            None => {
                self.coeffs.clear();
                self.start = self.prec;
            }
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.start += k as i32;
            }
        }
        self
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn prec(&self) -> i32 {
        self.prec
    }

    pub fn valuation(&self) -> Valuation {
        if self.coeffs.is_empty() {
            Valuation::AtLeast(self.prec)
        } else {
            Valuation::Exact(self.start)
        }
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at exponent `e`, or `None` when `e` is at or above the precision.
    pub fn coeff(&self, e: i32) -> Option<FieldElem> {
        if e >= self.prec {
            return None;
        }
        let v = if e < self.start {
            0
        } else {
            self.coeffs[(e - self.start) as usize]
        };
        Some(FieldElem {
            value: v,
            p: self.p,
        })
    }

    /// Nonzero terms as `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.start + i as i32, c))
    }

    /// Lowers the precision to `prec` (no-op when already lower).
    pub fn truncate(&self, prec: i32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        if prec <= self.start {
            return Series::zero(self.p, prec);
        }
        let mut out = self.clone();
        out.coeffs.truncate((prec - self.start) as usize);
        out.prec = prec;
        out.normalized()
    }

    fn same_modulus(&self, o: &Series) -> Result<()> {
        if self.p != o.p {
            Err(Error::ModulusMismatch(self.p, o.p))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &Series) -> Result<Series> {
        self.same_modulus(o)?;
        Ok(self.combine(o, false))
    }

    pub fn try_sub(&self, o: &Series) -> Result<Series> {
        self.same_modulus(o)?;
        Ok(self.combine(o, true))
    }

    fn combine(&self, o: &Series, subtract: bool) -> Series {
        let prec = self.prec.min(o.prec);
        let lo = self.start.min(o.start).min(prec);
        let n = (prec - lo) as usize;
        let p = self.p;
        let mut coeffs = vec![0u32; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let e = self.start + i as i32;
            if e >= prec {
                break;
            }
            coeffs[(e - lo) as usize] = c;
        }
        for (i, &c) in o.coeffs.iter().enumerate() {
            let e = o.start + i as i32;
            if e >= prec {
                break;
            }
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = if subtract {
                (*slot + p - c) % p
            } else {
                (*slot + c) % p
            };
        }
        Series {
            p,
            start: lo,
            coeffs,
            prec,
        }
        .normalized()
    }

    /// Cauchy product with precision `min(a.prec + val b, b.prec + val a)`.
    pub fn try_mul(&self, o: &Series) -> Result<Series> {
        self.same_modulus(o)?;
        Ok(self.product(o))
    }

    fn product(&self, o: &Series) -> Series {
        let prec = (self.prec + o.start).min(o.prec + self.start);
        let v = self.start + o.start;
        if self.coeffs.is_empty() || o.coeffs.is_empty() || prec <= v {
            return Series::zero(self.p, prec);
        }
        let n = (prec - v) as usize;
        let mut acc = vec![0u64; n];
        for (i, &x) in self.coeffs.iter().enumerate().take(n) {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            let lim = o.coeffs.len().min(n - i);
            for (slot, &y) in acc[i..i + lim].iter_mut().zip(&o.coeffs[..lim]) {
                *slot += x * y as u64;
            }
        }
        let p = self.p as u64;
        let coeffs = acc.into_iter().map(|s| (s % p) as u32).collect();
        Series {
            p: self.p,
            start: v,
            coeffs,
            prec,
        }
        .normalized()
    }

    /// Multiplicative inverse; fails when the series vanishes to precision.
    pub fn inv(&self) -> Result<Series> {
        if self.coeffs.is_empty() {
            return Err(Error::NotInvertible { prec: self.prec });
        }
        let p = self.p as u64;
        let n = self.coeffs.len();
        let lead_inv = pow_mod(self.coeffs[0] as u64, p - 2, p);
        let mut out = vec![0u32; n];
        out[0] = lead_inv as u32;
        for k in 1..n {
            let mut s = 0u64;
            for j in 1..=k {
                s += self.coeffs[j] as u64 * out[k - j] as u64;
            }
            out[k] = ((p - s % p) % p * lead_inv % p) as u32;
        }
        let v = self.start;
        Ok(Series {
            p: self.p,
            start: -v,
            coeffs: out,
            prec: -v + n as i32,
        })
    }

    /// Frobenius iterated `e` times: coefficients raised to the power `p^e`.
    pub fn frobenius(&self, e: u32) -> Series {
        let p = self.p as u64;
        // c^(p^e) = c^(p^e mod (p-1)) on nonzero c
        let r = match pow_mod(p, e as u64, p - 1) {
            0 => p - 1,
            r => r,
        };
        if r == 1 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| pow_mod(c as u64, r, p) as u32)
            .collect();
        Series {
            p: self.p,
            start: self.start,
            coeffs,
            prec: self.prec,
        }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i32) -> Series {
        Series {
            p: self.p,
            start: self.start + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec + k,
        }
    }

    /// Multiplication by a field scalar.
    pub fn scale(&self, c: i64) -> Series {
        let p = self.p as u64;
        let c = c.rem_euclid(self.p as i64) as u64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&x| (x as u64 * c % p) as u32)
            .collect();
        Series {
            p: self.p,
            start: self.start,
            coeffs,
            prec: self.prec,
        }
        .normalized()
    }

    /// Whether the series lies in `P^k`; undecidable when `k` exceeds the precision.
    pub fn in_power(&self, k: i32) -> Result<bool> {
        match self.valuation() {
            Valuation::Exact(v) => Ok(v >= k),
            Valuation::AtLeast(n) if k <= n => Ok(true),
            Valuation::AtLeast(n) => Err(Error::InsufficientPrecision { needed: k, prec: n }),
        }
    }

    /// Membership in `P^l` for rational `l`, read as `P^ceil(l)`.
    pub fn in_power_q(&self, l: Rational64) -> Result<bool> {
        self.in_power(ceil_q(l))
    }

    /// Parses the text form, e.g. `3*t^-2 + 1*t^0 + 10*t^4 prec=40`.
    ///
    /// `default_prec` is used when no `prec=` clause is present.
    pub fn parse(s: &str, p: u32, default_prec: i32) -> Result<Series> {
        let (body, prec) = match s.find("prec=") {
            Some(i) => {
                let n = s[i + 5..]
                    .trim()
                    .parse::<i32>()
                    .map_err(|_| Error::Parse(format!("bad precision in {s:?}")))?;
                (&s[..i], n)
            }
            None => (s, default_prec),
        };
        let terms = parse_terms(body)?;
        Series::from_terms(p, &terms, prec)
    }
}

/// Exact ceiling of a rational.
pub fn ceil_q(l: Rational64) -> i32 {
    let (n, d) = (*l.numer(), *l.denom());
    num_integer::Integer::div_ceil(&n, &d) as i32
}

fn parse_terms(body: &str) -> Result<Vec<(i32, i64)>> {
    let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty series".into()));
    }
    let mut pieces = Vec::new();
    let mut cur = String::new();
    let mut prev = ' ';
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && prev != '^' {
            pieces.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = ch;
    }
    pieces.push(cur);
    pieces.into_iter().map(|t| parse_term(&t)).collect()
}

fn parse_term(raw: &str) -> Result<(i32, i64)> {
    let bad = || Error::Parse(format!("bad term {raw:?}"));
    let t = raw.strip_prefix('+').unwrap_or(raw);
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, t),
    };
    let (coef, var) = match t.find('t') {
        None => (t, None),
        Some(i) => {
            let c = t[..i].trim_end_matches('*');
            (c, Some(&t[i + 1..]))
        }
    };
    let c = if coef.is_empty() {
        1
    } else {
        coef.parse::<i64>().map_err(|_| bad())?
    };
    let e = match var {
        None => 0,
        Some("") => 1,
        Some(rest) => rest
            .strip_prefix('^')
            .ok_or_else(bad)?
            .parse::<i32>()
            .map_err(|_| bad())?,
    };
    Ok((e, sign * c))
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.terms().map(|(e, c)| format!("{c}*t^{e}")).collect();
        if body.is_empty() {
            write!(f, "0 prec={}", self.prec)
        } else {
            write!(f, "{} prec={}", body.join(" + "), self.prec)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    p: u32,
    prec: i32,
    terms: Vec<(i32, i64)>,
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            p: self.p,
            prec: self.prec,
            terms: self.terms().map(|(e, c)| (e, c as i64)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::deserialize(d)?;
        Series::from_terms(r.p, &r.terms, r.prec).map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Series> for &Series {
            type Output = Series;
            /// Panics on modulus mismatch; use the `try_` form for fallible use.
            fn $method(self, o: &Series) -> Series {
                self.$inner(o).expect("series modulus mismatch")
            }
        }
        impl $tr<Series> for Series {
            type Output = Series;
            fn $method(self, o: Series) -> Series {
                (&self).$method(&o)
            }
        }
        impl $tr<&Series> for Series {
            type Output = Series;
            fn $method(self, o: &Series) -> Series {
                (&self).$method(o)
            }
        }
        impl $tr<Series> for &Series {
            type Output = Series;
            fn $method(self, o: Series) -> Series {
                self.$method(&o)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 11;

    fn s(terms: &[(i32, i64)], prec: i32) -> Series {
        Series::from_terms(P, terms, prec).unwrap()
    }

    #[test]
    fn additive_cancellation_keeps_precision() {
        let a = s(&[(-1, 1), (0, 1)], 10);
        let b = s(&[(0, -1)], 10);
        let c = &a + &b;
        assert_eq!(c, s(&[(-1, 1)], 10));
        assert_eq!(c.prec(), 10);
    }

    #[test]
    fn adding_zero_is_identity() {
        let a = s(&[(-2, 3), (1, 4)], 12);
        assert_eq!(&a + &Series::zero(P, 12), a);
    }

    #[test]
    fn addition_at_the_precision_floor() {
        let n = 8;
        let a = s(&[(0, 1), (n - 1, 1)], n);
        let b = s(&[(0, 1)], n);
        let c = &a + &b;
        assert_eq!(c, s(&[(0, 2), (n - 1, 1)], n));
        assert_eq!(c.prec(), n);
    }

    #[test]
    fn monomial_products() {
        let t = s(&[(1, 1)], 20);
        let t2 = s(&[(2, 1)], 20);
        assert_eq!((&t * &t2).terms().collect::<Vec<_>>(), vec![(3, 1)]);
    }

    #[test]
    fn difference_of_squares() {
        let a = s(&[(0, 1), (1, 1)], 6);
        let b = s(&[(0, 1), (1, -1)], 6);
        assert_eq!(&a * &b, s(&[(0, 1), (2, -1)], 6));
    }

    #[test]
    fn product_precision_rule() {
        let a = s(&[(2, 1)], 10);
        let b = s(&[(-1, 1)], 10);
        assert_eq!((&a * &b).prec(), 9);
    }

    #[test]
    fn inverse_of_uniformizer() {
        let t = s(&[(1, 1)], 10);
        let inv = t.inv().unwrap();
        assert_eq!(inv.terms().collect::<Vec<_>>(), vec![(-1, 1)]);
        assert_eq!(inv.valuation(), Valuation::Exact(-1));
    }

    #[test]
    fn inverse_is_geometric_series() {
        let a = s(&[(0, 1), (1, 1)], 6);
        let inv = a.inv().unwrap();
        let expected: Vec<(i32, i64)> = (0..6)
            .map(|k| (k, if k % 2 == 0 { 1 } else { -1 }))
            .collect();
        assert_eq!(inv, s(&expected, 6));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(
            Series::zero(P, 5).inv(),
            Err(Error::NotInvertible { prec: 5 })
        );
    }

    #[test]
    fn frobenius_is_identity_on_prime_field() {
        let a = s(&[(-3, 7), (0, 2), (4, 10)], 9);
        for e in 0..4 {
            assert_eq!(a.frobenius(e), a);
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(s(&[(-2, 1), (0, 1)], 5).valuation(), Valuation::Exact(-2));
        assert_eq!(s(&[(3, 7)], 10).valuation(), Valuation::Exact(3));
        assert_eq!(Series::zero(P, 5).valuation(), Valuation::AtLeast(5));
    }

    #[test]
    fn membership_needs_precision() {
        let z = Series::zero(P, 5);
        assert_eq!(z.in_power(5), Ok(true));
        assert!(matches!(
            z.in_power(6),
            Err(Error::InsufficientPrecision { .. })
        ));
        let a = s(&[(2, 1)], 4);
        assert_eq!(a.in_power(7), Ok(false));
        assert_eq!(a.in_power_q(Rational64::new(3, 2)), Ok(true));
        assert_eq!(a.in_power_q(Rational64::new(5, 2)), Ok(false));
        assert_eq!(a.in_power_q(Rational64::new(-1, 2)), Ok(true));
    }

    #[test]
    fn ceiling_of_rationals() {
        assert_eq!(ceil_q(Rational64::new(-1, 2)), 0);
        assert_eq!(ceil_q(Rational64::new(1, 2)), 1);
        assert_eq!(ceil_q(Rational64::new(-3, 2)), -1);
        assert_eq!(ceil_q(Rational64::new(4, 1)), 4);
    }

    #[test]
    fn text_round_trip() {
        let a = Series::parse("3*t^-2 + 1*t^0 + 10*t^4 prec=40", P, 0).unwrap();
        assert_eq!(a.to_string(), "3*t^-2 + 1*t^0 + 10*t^4 prec=40");
        assert_eq!(Series::parse(&a.to_string(), P, 0).unwrap(), a);
        let b = Series::parse("-t^-1 + 2 - t", P, 10).unwrap();
        assert_eq!(b, s(&[(-1, -1), (0, 2), (1, -1)], 10));
        assert!(Series::parse("t^12 prec=10", P, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = s(&[(-2, 3), (0, 1), (4, 10)], 40);
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(j, r#"{"p":11,"prec":40,"terms":[[-2,3],[0,1],[4,10]]}"#);
        assert_eq!(serde_json::from_str::<Series>(&j).unwrap(), a);
    }

    #[test]
    fn modulus_mismatch_is_reported() {
        let a = Series::one(11, 5);
        let b = Series::one(13, 5);
        assert_eq!(a.try_add(&b), Err(Error::ModulusMismatch(11, 13)));
        assert!(Series::from_terms(12, &[], 3).is_err());
    }
}
