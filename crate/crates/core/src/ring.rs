//! Exact coefficient rings.
//!
//! Every series in the crate is generic over [`Coeff`]. The user-facing rings
//! are the rationals, the fifth cyclotomic field `Q(ζ)` and `GF(2)`. The
//! integer ring `Z` and `Z[ζ]` are also `Coeff` implementors; the heavy
//! builders run there and convert to rationals at the end.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Element of `Q(ζ)`, ζ a primitive fifth root of unity.
pub type CycloElem = Cyclo<Rational>;

/// Element of `Z[ζ]`.
pub type CycloInt = Cyclo<BigInt>;

/// Ring carried by a dynamically typed series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingTag {
    Rational,
    Cyclo,
    Gf2,
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingTag::Rational => "rational",
            RingTag::Cyclo => "cyclo",
            RingTag::Gf2 => "gf2",
        })
    }
}

impl FromStr for RingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rational" | "q" => Ok(RingTag::Rational),
            "cyclo" | "cyclotomic" => Ok(RingTag::Cyclo),
            "gf2" => Ok(RingTag::Gf2),
            other => Err(Error::Parse {
                position: 0,
                message: format!("unknown ring `{other}`"),
            }),
        }
    }
}

/// Commutative ring with identity, as used for series coefficients.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;

    /// Image of a rational number, if the ring contains one.
    fn from_rational(r: &Rational) -> Option<Self>;

    /// `ζ^k` when the ring contains a primitive fifth root of unity.
    fn zeta_pow(_k: i64) -> Option<Self> {
        None
    }

    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// Multiplicative inverse, `None` for non-units.
    fn inverse(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign_ref(other);
        out
    }

    /// First `len` coefficients of the Cauchy product of `a` and `b`.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let mut out = vec![Self::zero(); len];
        for (i, x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    out[i + j].add_assign_ref(&x.mul_ref(y));
                }
            }
        }
        out
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        r.is_integer().then(|| r.numer().clone())
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        Coeff::is_one(&self.abs()).then(|| self.clone())
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    // Clears denominators and convolves over Z; per-term gcds dominate otherwise.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let (ai, da) = clear_denominators(&a[..a.len().min(len)]);
        let (bi, db) = clear_denominators(&b[..b.len().min(len)]);
        let den = da * db;
        BigInt::convolve(&ai, &bi, len)
            .into_iter()
            .map(|n| Rational::new(n, den.clone()))
            .collect()
    }
}

/// Returns integer numerators scaled to a common denominator, and that denominator.
pub fn clear_denominators(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = values
        .iter()
        .fold(<BigInt as Coeff>::one(), |acc, v| acc.lcm(v.denom()));
    let ints = values
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (ints, den)
}

/// Element of the field with two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf2(pub bool);

impl fmt::Display for Gf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Coeff for Gf2 {
    fn zero() -> Self {
        Gf2(false)
    }
    fn one() -> Self {
        Gf2(true)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn from_i64(v: i64) -> Self {
        Gf2(v.rem_euclid(2) == 1)
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        if r.denom().is_even() {
            return None;
        }
        Some(Gf2(r.numer().is_odd()))
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.0 ^= other.0;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        self.0 ^= other.0;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        Gf2(self.0 & other.0)
    }
    fn neg_ref(&self) -> Self {
        *self
    }
    fn inverse(&self) -> Option<Self> {
        self.0.then_some(*self)
    }

    // Bit-packed carry-less product.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let words = len.div_ceil(64);
        let pack = |s: &[Gf2]| {
            let mut w = vec![0u64; words];
            for (i, bit) in s.iter().enumerate().take(len) {
                if bit.0 {
                    w[i / 64] |= 1 << (i % 64);
                }
            }
            w
        };
        let bw = pack(b);
        let mut acc = vec![0u64; words];
        for (i, bit) in a.iter().enumerate().take(len) {
            if !bit.0 {
                continue;
            }
            let (ws, bs) = (i / 64, i % 64);
            for k in 0..words - ws {
                let mut v = bw[k] << bs;
                if bs != 0 && k > 0 {
                    v |= bw[k - 1] >> (64 - bs);
                }
                acc[k + ws] ^= v;
            }
        }
        (0..len)
            .map(|i| Gf2(acc[i / 64] >> (i % 64) & 1 == 1))
            .collect()
    }
}

/// `c0 + c1·ζ + c2·ζ² + c3·ζ³` over a base ring, with `ζ⁴ = −1 − ζ − ζ² − ζ³`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyclo<T> {
    pub coeffs: [T; 4],
}

impl<T: Coeff> Cyclo<T> {
    pub fn new(coeffs: [T; 4]) -> Self {
        Cyclo { coeffs }
    }

    pub fn from_base(c: T) -> Self {
        Cyclo::new([c, T::zero(), T::zero(), T::zero()])
    }

    /// Reduces a polynomial in ζ of any degree to the power basis.
    pub fn from_poly(poly: &[T]) -> Self {
        let mut five = [T::zero(), T::zero(), T::zero(), T::zero(), T::zero()];
        for (k, c) in poly.iter().enumerate() {
            five[k % 5].add_assign_ref(c);
        }
        let [c0, c1, c2, c3, c4] = five;
        Cyclo::new([c0.sub_ref(&c4), c1.sub_ref(&c4), c2.sub_ref(&c4), c3.sub_ref(&c4)])
    }

    /// Canonical form of `ζ^k`.
    pub fn zeta(k: i64) -> Self {
        let mut poly = vec![T::zero(); 5];
        poly[k.rem_euclid(5) as usize] = T::one();
        Cyclo::from_poly(&poly)
    }

    /// `self · ζ^k`, computed by rotation.
    pub fn mul_zeta_pow(&self, k: i64) -> Self {
        let shift = k.rem_euclid(5) as usize;
        if shift == 0 {
            return self.clone();
        }
        // ζ⁴ = −1 − ζ − ζ² − ζ³, so the coefficient rotated onto ζ⁴ is subtracted everywhere
        let top = &self.coeffs[4 - shift];
        let at = |i: usize| -> T {
            let src = (i + 5 - shift) % 5;
            if src == 4 {
                top.neg_ref()
            } else {
                self.coeffs[src].sub_ref(top)
            }
        };
        Cyclo::new([at(0), at(1), at(2), at(3)])
    }

    /// Galois conjugate `ζ ↦ ζ^k` for `k` prime to 5.
    pub fn conjugate(&self, k: i64) -> Self {
        debug_assert!(k.rem_euclid(5) != 0);
        let mut poly = vec![T::zero(); 5];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[(i as i64 * k).rem_euclid(5) as usize].add_assign_ref(c);
        }
        Cyclo::from_poly(&poly)
    }

    /// Field norm down to the base ring.
    pub fn norm(&self) -> T {
        let prod = self
            .mul_ref(&self.conjugate(2))
            .mul_ref(&self.conjugate(3))
            .mul_ref(&self.conjugate(4));
        prod.coeffs[0].clone()
    }

    pub fn is_base(&self) -> bool {
        self.coeffs[1..].iter().all(Coeff::is_zero)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Cyclo<U> {
        Cyclo::new([
            f(&self.coeffs[0]),
            f(&self.coeffs[1]),
            f(&self.coeffs[2]),
            f(&self.coeffs[3]),
        ])
    }
}

impl<T: Coeff> fmt::Display for Cyclo<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c0, c1, c2, c3] = &self.coeffs;
        write!(f, "({c0}, {c1}, {c2}, {c3})")
    }
}

impl FromStr for Cyclo<Rational> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse {
                position: 0,
                message: format!("expected four cyclotomic components, got `{s}`"),
            });
        }
        let mut out = Cyclo::zero();
        for (slot, text) in out.coeffs.iter_mut().zip(parts) {
            *slot = parse_rational(text)?;
        }
        Ok(out)
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    text.trim().parse::<Rational>().map_err(|_| Error::Parse {
        position: 0,
        message: format!("invalid rational `{text}`"),
    })
}

impl<T: Coeff> Coeff for Cyclo<T> {
    fn zero() -> Self {
        Cyclo::from_base(T::zero())
    }
    fn one() -> Self {
        Cyclo::from_base(T::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }
    fn from_i64(v: i64) -> Self {
        Cyclo::from_base(T::from_i64(v))
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        T::from_rational(r).map(Cyclo::from_base)
    }
    fn zeta_pow(k: i64) -> Option<Self> {
        Some(Cyclo::zeta(k))
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign_ref(b);
        }
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.sub_assign_ref(b);
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut poly = vec![T::zero(); 7];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j].add_assign_ref(&a.mul_ref(b));
                }
            }
        }
        Cyclo::from_poly(&poly)
    }
    fn neg_ref(&self) -> Self {
        self.map(Coeff::neg_ref)
    }
    fn inverse(&self) -> Option<Self> {
        // a⁻¹ = σ₂(a)σ₃(a)σ₄(a) / N(a)
        let cofactor = self
            .conjugate(2)
            .mul_ref(&self.conjugate(3))
            .mul_ref(&self.conjugate(4));
        let norm = self.mul_ref(&cofactor).coeffs[0].clone();
        let inv = norm.inverse()?;
        Some(cofactor.map(|c| c.mul_ref(&inv)))
    }

    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let split = |s: &[Self], k: usize| -> Vec<T> {
            s.iter().take(len).map(|c| c.coeffs[k].clone()).collect()
        };
        let acomp: Vec<Vec<T>> = (0..4).map(|k| split(a, k)).collect();
        let bcomp: Vec<Vec<T>> = (0..4).map(|k| split(b, k)).collect();
        let mut by_degree: Vec<Vec<T>> = vec![vec![T::zero(); len]; 7];
        for (i, ac) in acomp.iter().enumerate() {
            if ac.iter().all(Coeff::is_zero) {
                continue;
            }
            for (j, bc) in bcomp.iter().enumerate() {
                if bc.iter().all(Coeff::is_zero) {
                    continue;
                }
                for (slot, v) in by_degree[i + j].iter_mut().zip(T::convolve(ac, bc, len)) {
                    slot.add_assign_ref(&v);
                }
            }
        }
        (0..len)
            .map(|n| {
                let poly: Vec<T> = by_degree.iter().map(|d| d[n].clone()).collect();
                Cyclo::from_poly(&poly)
            })
            .collect()
    }
}

/// Product in canonical form.
pub fn cyclo_mul(a: &CycloElem, b: &CycloElem) -> CycloElem {
    a.mul_ref(b)
}

/// Canonical form of `ζ^k`; `k` may be negative.
pub fn cyclo_power_of_zeta(k: i64) -> CycloElem {
    Cyclo::zeta(k)
}

/// The rational value of a cyclotomic element that lies in `Q`.
pub fn cyclo_to_rational(a: &CycloElem) -> Result<Rational> {
    if a.is_base() {
        Ok(a.coeffs[0].clone())
    } else {
        Err(Error::NonRationalValue(a.to_string()))
    }
}

pub fn int_to_rational(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn cyc(c: [i64; 4]) -> CycloElem {
        Cyclo::new(c.map(|v| r(v, 1)))
    }

    #[test]
    fn zeta_times_zeta_four_is_one() {
        let p = cyclo_mul(&cyclo_power_of_zeta(1), &cyclo_power_of_zeta(4));
        assert_eq!(p, CycloElem::one());
    }

    #[test]
    fn primitive_roots_sum_to_minus_one() {
        let a = cyclo_power_of_zeta(1).add_ref(&cyclo_power_of_zeta(4));
        let b = cyclo_power_of_zeta(2).add_ref(&cyclo_power_of_zeta(3));
        assert_eq!(cyclo_mul(&a, &b), CycloElem::from_i64(-1));
    }

    #[test]
    fn square_below_degree_four() {
        let a = cyc([1, 1, 0, 0]);
        assert_eq!(cyclo_mul(&a, &a), cyc([1, 2, 1, 0]));
    }

    #[test]
    fn zeta_powers_reduce() {
        assert_eq!(cyclo_power_of_zeta(0), CycloElem::one());
        assert_eq!(cyclo_power_of_zeta(4), cyc([-1, -1, -1, -1]));
        assert_eq!(cyclo_power_of_zeta(-3), cyc([0, 0, 1, 0]));
        assert_eq!(cyclo_power_of_zeta(12), cyclo_power_of_zeta(2));
    }

    #[test]
    fn to_rational_accepts_base_elements() {
        assert_eq!(cyclo_to_rational(&cyc([7, 0, 0, 0])).unwrap(), r(7, 1));
        let mut sum = CycloElem::zero();
        for j in 0..5 {
            sum.add_assign_ref(&cyclo_power_of_zeta(5 * j));
        }
        let avg = sum.map(|c| c * r(1, 5));
        assert_eq!(cyclo_to_rational(&avg).unwrap(), r(1, 1));
    }

    #[test]
    fn to_rational_rejects_irrational() {
        assert!(matches!(
            cyclo_to_rational(&cyc([1, 1, 0, 0])),
            Err(Error::NonRationalValue(_))
        ));
    }

    #[test]
    fn inverse_uses_norm() {
        let one_minus_zeta = cyc([1, -1, 0, 0]);
        assert_eq!(one_minus_zeta.norm(), r(5, 1));
        let inv = one_minus_zeta.inverse().unwrap();
        assert_eq!(cyclo_mul(&inv, &one_minus_zeta), CycloElem::one());
        // 1 - ζ is not a unit of Z[ζ].
        assert!(CycloInt::new([1, -1, 0, 0].map(BigInt::from)).inverse().is_none());
        // 1 + ζ is.
        let u = CycloInt::new([1, 1, 0, 0].map(BigInt::from));
        assert_eq!(u.mul_ref(&u.inverse().unwrap()), CycloInt::one());
        assert!(CycloElem::zero().inverse().is_none());
    }

    #[test]
    fn conjugate_is_ring_map() {
        let a = cyc([3, -1, 2, 5]);
        let b = cyc([-2, 0, 1, 1]);
        for k in 1..5 {
            assert_eq!(
                a.mul_ref(&b).conjugate(k),
                a.conjugate(k).mul_ref(&b.conjugate(k))
            );
        }
    }

    #[test]
    fn rotation_matches_multiplication() {
        let a = cyc([3, -1, 2, 5]);
        for k in -6..7 {
            assert_eq!(a.mul_zeta_pow(k), a.mul_ref(&cyclo_power_of_zeta(k)));
        }
    }

    #[test]
    fn gf2_from_rational_needs_odd_denominator() {
        assert_eq!(Gf2::from_rational(&r(3, 5)), Some(Gf2(true)));
        assert_eq!(Gf2::from_rational(&r(4, 3)), Some(Gf2(false)));
        assert_eq!(Gf2::from_rational(&r(1, 2)), None);
    }

    #[test]
    fn gf2_convolve_matches_naive() {
        let a: Vec<Gf2> = (0..150).map(|i| Gf2(i % 3 == 0 || i % 7 == 2)).collect();
        let b: Vec<Gf2> = (0..150).map(|i| Gf2(i % 5 == 1 || i == 0)).collect();
        let mut naive = vec![Gf2(false); 150];
        for i in 0..150 {
            for j in 0..150 - i {
                naive[i + j].0 ^= a[i].0 & b[j].0;
            }
        }
        assert_eq!(Gf2::convolve(&a, &b, 150), naive);
    }

    #[test]
    fn rational_convolve_matches_naive() {
        let a = vec![r(1, 2), r(-3, 4), r(0, 1), r(5, 6)];
        let b = vec![r(2, 3), r(1, 1), r(-1, 10), r(7, 1)];
        let mut naive = vec![<Rational as Coeff>::zero(); 4];
        for i in 0..4 {
            for j in 0..4 - i {
                naive[i + j] += &a[i] * &b[j];
            }
        }
        assert_eq!(Rational::convolve(&a, &b, 4), naive);
    }

    #[test]
    fn cyclo_display_round_trips() {
        let a = Cyclo::new([r(1, 5), r(-2, 1), r(0, 1), r(7, 10)]);
        let back: CycloElem = a.to_string().parse().unwrap();
        assert_eq!(a, back);
    }
}
