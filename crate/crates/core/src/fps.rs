//! Truncated formal power series.
//!
//! [`Fps`] is the typed workhorse: a coefficient vector for `q⁰..q^order`.
//! Binary operations truncate to the smaller order. [`Series`] wraps the three
//! user-facing rings behind a runtime [`RingTag`] for the CLI and JSON.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{parse_rational, Coeff, CycloElem, Gf2, Rational, RingTag};

#[derive(Debug, Clone, PartialEq)]
pub struct Fps<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Fps<C> {
    pub fn zero(order: usize) -> Self {
        Fps {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c·q^e`, or zero if `e > order`.
    pub fn monomial(c: C, e: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if e <= order {
            s.coeffs[e] = c;
        }
        s
    }

    /// Panics on an empty vector: a series always has a constant term.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Fps { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> C) -> Self {
        Fps {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        Fps {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&C) -> U) -> Fps<U> {
        Fps {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| self.coeffs[n].add_ref(&other.coeffs[n]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| self.coeffs[n].sub_ref(&other.coeffs[n]))
    }

    pub fn neg(&self) -> Self {
        self.map(Coeff::neg_ref)
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&C::from_i64(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Fps {
            coeffs: C::convolve(&self.coeffs, &other.coeffs, order + 1),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..k {
            acc = Fps::mul(&acc, self);
        }
        acc
    }

    /// Multiplication by `q^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        Self::from_fn(self.order(), |n| {
            if n >= k {
                self.coeffs[n - k].clone()
            } else {
                C::zero()
            }
        })
    }

    /// Multiplicative inverse up to the truncation order.
    pub fn invert(&self) -> Result<Self> {
        let inv0 = self.coeffs[0]
            .inverse()
            .ok_or_else(|| Error::NonUnitConstantTerm(self.coeffs[0].to_string()))?;
        let mut out = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = C::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc.add_assign_ref(&self.coeffs[k].mul_ref(&out[n - k]));
                }
            }
            out.push(acc.mul_ref(&inv0).neg_ref());
        }
        Ok(Fps { coeffs: out })
    }

    /// In place `f ← f·(1 − c·q^e)`.
    pub fn mul_one_minus(&mut self, c: &C, e: usize) {
        let unit = c.is_one();
        if e == 0 {
            let factor = C::one().sub_ref(c);
            for x in &mut self.coeffs {
                *x = x.mul_ref(&factor);
            }
            return;
        }
        for n in (e..self.coeffs.len()).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(n);
            let prev = &lo[n - e];
            if prev.is_zero() {
                continue;
            }
            if unit {
                hi[0].sub_assign_ref(prev);
            } else {
                hi[0].sub_assign_ref(&prev.mul_ref(c));
            }
        }
    }

    /// In place `f ← f / (1 − c·q^e)`.
    pub fn div_one_minus(&mut self, c: &C, e: usize) -> Result<()> {
        if e == 0 {
            let factor = C::one().sub_ref(c);
            let inv = factor
                .inverse()
                .ok_or_else(|| Error::NonUnitConstantTerm(factor.to_string()))?;
            for x in &mut self.coeffs {
                *x = x.mul_ref(&inv);
            }
            return Ok(());
        }
        let unit = c.is_one();
        for n in e..self.coeffs.len() {
            let (lo, hi) = self.coeffs.split_at_mut(n);
            let prev = &lo[n - e];
            if prev.is_zero() {
                continue;
            }
            if unit {
                hi[0].add_assign_ref(prev);
            } else {
                hi[0].add_assign_ref(&prev.mul_ref(c));
            }
        }
        Ok(())
    }

    /// `g[n] = f[5n + a]`.
    pub fn dissect(&self, a: usize) -> Self {
        self.dissect_by(5, a)
    }

    pub fn dissect_by(&self, modulus: usize, a: usize) -> Self {
        assert!(a < modulus, "residue {a} out of range for modulus {modulus}");
        assert!(a <= self.order(), "order {} too small to dissect at {a}", self.order());
        let order = (self.order() - a) / modulus;
        Self::from_fn(order, |n| self.coeffs[modulus * n + a].clone())
    }

    /// `f(q) ↦ f(q⁵)` at the same order.
    pub fn substitute_q5(&self) -> Self {
        self.inflate(5)
    }

    /// `f(q) ↦ f(q^k)` built to `order`; needs `self.order() ≥ order / k`.
    pub fn inflate_to(&self, k: usize, order: usize) -> Self {
        assert!(k >= 1);
        assert!(self.order() >= order / k, "series too short to inflate to order {order}");
        Self::from_fn(order, |n| {
            if n % k == 0 {
                self.coeffs[n / k].clone()
            } else {
                C::zero()
            }
        })
    }

    pub fn inflate(&self, k: usize) -> Self {
        assert!(k >= 1);
        Self::from_fn(self.order(), |n| {
            if n % k == 0 {
                self.coeffs[n / k].clone()
            } else {
                C::zero()
            }
        })
    }

    /// First index `≤ order` where the two series differ. Both operands must
    /// have been built to at least `order`.
    pub fn first_mismatch(&self, other: &Self, order: usize) -> Result<Option<usize>> {
        for s in [self, other] {
            if s.order() < order {
                return Err(Error::OrderMismatch {
                    want: order,
                    got: s.order(),
                });
            }
        }
        Ok((0..=order).find(|&n| self.coeffs[n] != other.coeffs[n]))
    }
}

impl Fps<Rational> {
    pub fn from_ints(values: &[i64]) -> Self {
        Fps::from_coeffs(values.iter().map(|&v| Rational::from_i64(v)).collect())
    }

    /// Integer coefficients, failing on the first non-integral one.
    pub fn to_integers(&self) -> Result<Fps<BigInt>> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(index, c)| {
                if c.is_integer() {
                    Ok(c.numer().clone())
                } else {
                    Err(Error::NonIntegralCoefficient {
                        index,
                        value: c.to_string(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Fps { coeffs })
    }
}

impl Fps<BigInt> {
    pub fn to_rational(&self) -> Fps<Rational> {
        self.map(|v| Rational::from_integer(v.clone()))
    }
}

/// Coefficientwise parity. Coefficients must have odd denominators.
pub fn reduce_mod2(f: &Fps<Rational>) -> Result<Fps<Gf2>> {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(index, c)| {
            if c.denom().is_even() {
                Err(Error::NonIntegralCoefficient {
                    index,
                    value: c.to_string(),
                })
            } else {
                Ok(Gf2(c.numer().is_odd()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Fps { coeffs })
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a, C: Coeff> $tr<&'a Fps<C>> for &'a Fps<C> {
            type Output = Fps<C>;
            fn $method(self, rhs: &'a Fps<C>) -> Fps<C> {
                Fps::$method(self, rhs)
            }
        }
        impl<C: Coeff> $tr<Fps<C>> for Fps<C> {
            type Output = Fps<C>;
            fn $method(self, rhs: Fps<C>) -> Fps<C> {
                Fps::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<C: Coeff> Neg for Fps<C> {
    type Output = Fps<C>;
    fn neg(self) -> Fps<C> {
        Fps::neg(&self)
    }
}

impl<C: Coeff> Neg for &Fps<C> {
    type Output = Fps<C>;
    fn neg(self) -> Fps<C> {
        Fps::neg(self)
    }
}

/// A ring element tagged with its ring.
#[derive(Debug, Clone, PartialEq)]
pub enum RingElem {
    Rational(Rational),
    Cyclo(CycloElem),
    Gf2(Gf2),
}

impl RingElem {
    pub fn ring(&self) -> RingTag {
        match self {
            RingElem::Rational(_) => RingTag::Rational,
            RingElem::Cyclo(_) => RingTag::Cyclo,
            RingElem::Gf2(_) => RingTag::Gf2,
        }
    }
}

/// A truncated series over one of the user-facing rings.
#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Rational(Fps<Rational>),
    Cyclo(Fps<CycloElem>),
    Gf2(Fps<Gf2>),
}

macro_rules! same_ring {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (Series::Rational($x), Series::Rational($y)) => Ok(Series::Rational($body)),
            (Series::Cyclo($x), Series::Cyclo($y)) => Ok(Series::Cyclo($body)),
            (Series::Gf2($x), Series::Gf2($y)) => Ok(Series::Gf2($body)),
            (a, b) => Err(Error::RingMismatch {
                left: a.ring(),
                right: b.ring(),
            }),
        }
    };
}

macro_rules! each_ring {
    ($s:expr, |$x:ident| $body:expr) => {
        match $s {
            Series::Rational($x) => Series::Rational($body),
            Series::Cyclo($x) => Series::Cyclo($body),
            Series::Gf2($x) => Series::Gf2($body),
        }
    };
}

impl Series {
    pub fn ring(&self) -> RingTag {
        match self {
            Series::Rational(_) => RingTag::Rational,
            Series::Cyclo(_) => RingTag::Cyclo,
            Series::Gf2(_) => RingTag::Gf2,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Series::Rational(f) => f.order(),
            Series::Cyclo(f) => f.order(),
            Series::Gf2(f) => f.order(),
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        same_ring!(self, other, |f, g| f.add(g))
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        same_ring!(self, other, |f, g| f.sub(g))
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        same_ring!(self, other, |f, g| f.mul(g))
    }

    pub fn scale(&self, c: &RingElem) -> Result<Series> {
        match (self, c) {
            (Series::Rational(f), RingElem::Rational(c)) => Ok(Series::Rational(f.scale(c))),
            (Series::Cyclo(f), RingElem::Cyclo(c)) => Ok(Series::Cyclo(f.scale(c))),
            (Series::Gf2(f), RingElem::Gf2(c)) => Ok(Series::Gf2(f.scale(c))),
            (s, c) => Err(Error::RingMismatch {
                left: s.ring(),
                right: c.ring(),
            }),
        }
    }

    pub fn shift(&self, k: usize) -> Series {
        each_ring!(self, |f| f.shift(k))
    }

    pub fn invert(&self) -> Result<Series> {
        Ok(match self {
            Series::Rational(f) => Series::Rational(f.invert()?),
            Series::Cyclo(f) => Series::Cyclo(f.invert()?),
            Series::Gf2(f) => Series::Gf2(f.invert()?),
        })
    }

    pub fn dissect(&self, a: usize) -> Series {
        each_ring!(self, |f| f.dissect(a))
    }

    pub fn substitute_q5(&self) -> Series {
        each_ring!(self, |f| f.substitute_q5())
    }

    pub fn reduce_mod2(&self) -> Result<Series> {
        match self {
            Series::Rational(f) => Ok(Series::Gf2(reduce_mod2(f)?)),
            other => Err(Error::RingMismatch {
                left: other.ring(),
                right: RingTag::Rational,
            }),
        }
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        match self {
            Series::Rational(f) => f.coeffs().iter().map(ToString::to_string).collect(),
            Series::Cyclo(f) => f.coeffs().iter().map(ToString::to_string).collect(),
            Series::Gf2(f) => f.coeffs().iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_json_value(&self) -> SeriesJson {
        SeriesJson {
            ring: self.ring(),
            order: self.order(),
            coeffs: self.coeff_strings(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("series JSON is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Series> {
        let raw: SeriesJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            position: e.column(),
            message: e.to_string(),
        })?;
        raw.try_into()
    }
}

/// Wire form: `{ring, order, coeffs: [strings]}` with rationals as `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub ring: RingTag,
    pub order: usize,
    pub coeffs: Vec<String>,
}

impl TryFrom<SeriesJson> for Series {
    type Error = Error;

    fn try_from(raw: SeriesJson) -> Result<Series> {
        if raw.coeffs.len() != raw.order + 1 {
            return Err(Error::Parse {
                position: 0,
                message: format!(
                    "order {} needs {} coefficients, found {}",
                    raw.order,
                    raw.order + 1,
                    raw.coeffs.len()
                ),
            });
        }
        Ok(match raw.ring {
            RingTag::Rational => Series::Rational(Fps::from_coeffs(
                raw.coeffs.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?,
            )),
            RingTag::Cyclo => Series::Cyclo(Fps::from_coeffs(
                raw.coeffs.iter().map(|c| c.parse()).collect::<Result<_>>()?,
            )),
            RingTag::Gf2 => Series::Gf2(Fps::from_coeffs(
                raw.coeffs
                    .iter()
                    .map(|c| match c.trim() {
                        "0" => Ok(Gf2(false)),
                        "1" => Ok(Gf2(true)),
                        other => Err(Error::Parse {
                            position: 0,
                            message: format!("invalid GF(2) coefficient `{other}`"),
                        }),
                    })
                    .collect::<Result<_>>()?,
            )),
        })
    }
}
