//! Builders that expand q-Pochhammer products, Lambert sums and the named
//! series of the mod-5 crank machinery into truncated series.
//!
//! Builders are generic over the coefficient ring. Integral objects are
//! usually built over `BigInt` (or `Z[ζ]`) and converted once, since
//! rational additions pay a gcd per term.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fps::Fps;
use crate::ring::{Coeff, Cyclo, CycloElem, Rational};

/// One factor `(ζ^zeta_pow · q^a_exp; q^base_exp)_∞^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PochFactor {
    pub a_exp: usize,
    pub zeta_pow: i64,
    pub base_exp: usize,
    /// Negative powers place the factor in the denominator.
    pub power: i32,
}

/// A finite product of (possibly reciprocal) q-Pochhammer symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PochSpec {
    pub factors: Vec<PochFactor>,
}

impl PochSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `(q^a;q^base)_∞^power`.
    pub fn with(mut self, a: usize, base: usize, power: i32) -> Self {
        self.factors.push(PochFactor {
            a_exp: a,
            zeta_pow: 0,
            base_exp: base,
            power,
        });
        self
    }

    /// Appends `(ζ^k q^a;q^base)_∞^power`.
    pub fn with_zeta(mut self, k: i64, a: usize, base: usize, power: i32) -> Self {
        self.factors.push(PochFactor {
            a_exp: a,
            zeta_pow: k,
            base_exp: base,
            power,
        });
        self
    }

    /// Appends `(q^{a_1},…,q^{a_k};q^base)_∞^power`.
    pub fn tuple(mut self, exps: &[usize], base: usize, power: i32) -> Self {
        for &a in exps {
            self = self.with(a, base, power);
        }
        self
    }

    pub fn reciprocal(&self) -> Self {
        PochSpec {
            factors: self
                .factors
                .iter()
                .map(|f| PochFactor {
                    power: -f.power,
                    ..*f
                })
                .collect(),
        }
    }

    pub fn concat(mut self, other: &PochSpec) -> Self {
        self.factors.extend_from_slice(&other.factors);
        self
    }

    pub fn needs_zeta(&self) -> bool {
        self.factors.iter().any(|f| f.zeta_pow.rem_euclid(5) != 0)
    }
}

fn factor_constant<C: Coeff>(zeta_pow: i64) -> Result<C> {
    if zeta_pow.rem_euclid(5) == 0 {
        Ok(C::one())
    } else {
        C::zeta_pow(zeta_pow).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "ζ^{zeta_pow} needs the cyclotomic ring"
            ))
        })
    }
}

/// Expands a product of Pochhammer symbols. Only factors `1 − c·q^e` with
/// `e ≤ order` contribute, so the product is finite.
pub fn pochhammer<C: Coeff>(spec: &PochSpec, order: usize) -> Result<Fps<C>> {
    let mut out = Fps::one(order);
    for f in &spec.factors {
        if f.base_exp == 0 {
            return Err(Error::InvalidArgument("Pochhammer base exponent must be ≥ 1".into()));
        }
        if f.a_exp == 0 && f.zeta_pow.rem_euclid(5) == 0 {
            return Err(Error::InvalidArgument(
                "(1;q)_∞ vanishes identically".into(),
            ));
        }
        let c: C = factor_constant(f.zeta_pow)?;
        for _ in 0..f.power.unsigned_abs() {
            let mut e = f.a_exp;
            while e <= order {
                if f.power > 0 {
                    out.mul_one_minus(&c, e);
                } else {
                    out.div_one_minus(&c, e)?;
                }
                e += f.base_exp;
            }
        }
    }
    Ok(out)
}

/// `numerators / denominators`, both given as positive-power specs.
pub fn product_quotient<C: Coeff>(
    numerators: &PochSpec,
    denominators: &PochSpec,
    order: usize,
) -> Result<Fps<C>> {
    pochhammer(&numerators.clone().concat(&denominators.reciprocal()), order)
}

/// `(q;q)_∞`.
pub fn euler<C: Coeff>(order: usize) -> Fps<C> {
    pochhammer(&PochSpec::new().with(1, 1, 1), order).expect("(q;q)_∞ is always well formed")
}

/// `(q⁵;q⁵)_∞⁴ / (q;q)_∞`, the common right side of the 5n+4 identities.
pub fn eta_quotient_5n4<C: Coeff>(order: usize) -> Fps<C> {
    let spec = PochSpec::new().with(5, 5, 4).with(1, 1, -1);
    pochhammer(&spec, order).expect("denominator has unit constant term")
}

/// The four series `A, B, C, D` of the 5-dissection of the crank quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Garvan {
    A,
    B,
    C,
    D,
}

impl Garvan {
    pub const ALL: [Garvan; 4] = [Garvan::A, Garvan::B, Garvan::C, Garvan::D];

    pub fn spec(self) -> PochSpec {
        match self {
            Garvan::A => PochSpec::new().tuple(&[2, 3, 5], 5, 1).tuple(&[1, 4], 5, -2),
            Garvan::B => PochSpec::new().with(5, 5, 1).tuple(&[1, 4], 5, -1),
            Garvan::C => PochSpec::new().with(5, 5, 1).tuple(&[2, 3], 5, -1),
            Garvan::D => PochSpec::new().tuple(&[1, 4, 5], 5, 1).tuple(&[2, 3], 5, -2),
        }
    }
}

pub fn named_series<C: Coeff>(name: Garvan, order: usize) -> Fps<C> {
    pochhammer(&name.spec(), order).expect("named series have unit denominators")
}

/// `Σ_{n≥0} q^{slope·n + offset} / (1 − q^{5n + den_residue})`.
pub fn lambert_one_sided<C: Coeff>(
    slope: usize,
    offset: usize,
    den_residue: usize,
    order: usize,
) -> Result<Fps<C>> {
    if den_residue == 0 {
        return Err(Error::InvalidArgument(
            "denominator 1 − q^{5n} vanishes at n = 0".into(),
        ));
    }
    if slope == 0 {
        return Err(Error::InvalidArgument(
            "numerator slope 0 gives infinitely many q^offset terms".into(),
        ));
    }
    let mut out = Fps::<C>::zero(order);
    let one = C::one();
    let coeffs = out.coeffs_mut();
    let mut n = 0;
    while slope * n + offset <= order {
        let step = 5 * n + den_residue;
        let mut e = slope * n + offset;
        while e <= order {
            coeffs[e].add_assign_ref(&one);
            e += step;
        }
        n += 1;
    }
    Ok(out)
}

fn check_rst(r: usize, s: usize, t: usize) -> Result<()> {
    if !(1..=4).contains(&r) || !(1..=4).contains(&s) || t > 4 {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ r, s ≤ 4 and 0 ≤ t ≤ 4, got ({r}, {s}, {t})"
        )));
    }
    Ok(())
}

/// Left side of the master Lambert formula:
/// `Σ q^{rn+t}/(1−q^{5n+s}) − Σ q^{(5−r)n+5+t−r−s}/(1−q^{5n+5−s})`.
pub fn lambert_master_lhs<C: Coeff>(r: usize, s: usize, t: usize, order: usize) -> Result<Fps<C>> {
    check_rst(r, s, t)?;
    let offset = (5 + t)
        .checked_sub(r + s)
        .ok_or_else(|| Error::NegativeExponent(format!("5 + t − r − s < 0 for ({r}, {s}, {t})")))?;
    let first = lambert_one_sided(r, t, s, order)?;
    let second = lambert_one_sided(5 - r, offset, 5 - s, order)?;
    Ok(&first - &second)
}

/// Product side `q^t·(q^{r+s},q^{5−r−s},q⁵,q⁵;q⁵)_∞ / (q^r,q^s,q^{5−r},q^{5−s};q⁵)_∞`.
///
/// For `r + s > 5` the numerator contains `(q^{5+d},q^{−d};q⁵)_∞` with
/// `d = r + s − 5`, which equals `−q^{−d}(q^d,q^{5−d};q⁵)_∞`.
pub fn lambert_master_rhs<C: Coeff>(r: usize, s: usize, t: usize, order: usize) -> Result<Fps<C>> {
    check_rst(r, s, t)?;
    if (r + s).is_multiple_of(5) {
        return Err(Error::DegenerateProduct { r, s });
    }
    let den = PochSpec::new().tuple(&[r, s, 5 - r, 5 - s], 5, 1);
    if r + s < 5 {
        let num = PochSpec::new().tuple(&[r + s, 5 - r - s, 5, 5], 5, 1);
        Ok(product_quotient::<C>(&num, &den, order)?.shift(t))
    } else {
        let d = r + s - 5;
        let shift = t.checked_sub(d).ok_or_else(|| {
            Error::NegativeExponent(format!("q^{{t−{d}}} with t = {t}"))
        })?;
        let num = PochSpec::new().tuple(&[d, 5 - d, 5, 5], 5, 1);
        Ok(product_quotient::<C>(&num, &den, order)?.shift(shift).neg())
    }
}

/// Both sides of the master Lambert formula at the same order.
pub fn lambert_master<C: Coeff>(
    r: usize,
    s: usize,
    t: usize,
    order: usize,
) -> Result<(Fps<C>, Fps<C>)> {
    let rhs = lambert_master_rhs(r, s, t, order)?;
    let lhs = lambert_master_lhs(r, s, t, order)?;
    Ok((lhs, rhs))
}

fn check_bilateral(i: usize, j: usize) -> Result<()> {
    if !(1..=4).contains(&i) || !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ i, j ≤ 4, got ({i}, {j})"
        )));
    }
    if (i + j).is_multiple_of(5) {
        return Err(Error::DegenerateProduct { r: i, s: j });
    }
    if i + j > 5 {
        return Err(Error::NegativeExponent(format!(
            "bilateral sum for ({i}, {j}) starts at q^{}",
            5 - (i + j) as i64
        )));
    }
    Ok(())
}

/// `Σ_{n∈Z} q^{ni}/(1−q^{5n+j})` via its product form.
pub fn bilateral_lambert<C: Coeff>(i: usize, j: usize, order: usize) -> Result<Fps<C>> {
    check_bilateral(i, j)?;
    let num = PochSpec::new().tuple(&[i + j, 5 - i - j, 5, 5], 5, 1);
    let den = PochSpec::new().tuple(&[i, j, 5 - i, 5 - j], 5, 1);
    product_quotient(&num, &den, order)
}

/// `Σ_{n∈Z} q^{ni}/(1−q^{5n+j})` summed term by term over both halves.
pub fn bilateral_lambert_sum<C: Coeff>(i: usize, j: usize, order: usize) -> Result<Fps<C>> {
    check_bilateral(i, j)?;
    let mut out = lambert_one_sided::<C>(i, 0, j, order)?;
    // n = −m: q^{−mi}/(1 − q^{j−5m}) = −Σ_{k≥0} q^{(5−i)m − j + k(5m−j)}
    let one = C::one();
    let coeffs = out.coeffs_mut();
    let mut m = 1;
    while (5 - i) * m - j <= order {
        let step = 5 * m - j;
        let mut e = (5 - i) * m - j;
        while e <= order {
            coeffs[e].sub_assign_ref(&one);
            e += step;
        }
        m += 1;
    }
    Ok(out)
}

/// `R_i(q) = Σ_{n≥1} q^{ni}/(1−q^{5n})`, `1 ≤ i ≤ 5`.
pub fn r_series<C: Coeff>(i: usize, order: usize) -> Fps<C> {
    assert!((1..=5).contains(&i), "R_i needs 1 ≤ i ≤ 5");
    let mut out = Fps::<C>::zero(order);
    let one = C::one();
    let coeffs = out.coeffs_mut();
    let mut n = 1;
    while n * i <= order {
        let mut e = n * i;
        while e <= order {
            coeffs[e].add_assign_ref(&one);
            e += 5 * n;
        }
        n += 1;
    }
    out
}

/// `S(q) = Σ_{n≥1} q^{n+1}/(1−q^{n+1})`; `S[n]` counts divisors of `n` that are at least 2.
pub fn s_series<C: Coeff>(order: usize) -> Fps<C> {
    let mut out = Fps::<C>::zero(order);
    let one = C::one();
    let coeffs = out.coeffs_mut();
    for m in 2..=order {
        for e in (m..=order).step_by(m) {
            coeffs[e].add_assign_ref(&one);
        }
    }
    out
}

/// `5·T(q) = q / ((1−q)(q;q)_∞)`.
pub fn t_series_times_five<C: Coeff>(order: usize) -> Fps<C> {
    let mut out = pochhammer::<C>(&PochSpec::new().with(1, 1, -1), order)
        .expect("(q;q)_∞ has unit constant term");
    out.div_one_minus(&C::one(), 1)
        .expect("1 − q has unit constant term");
    out.shift(1)
}

/// `T(q) = q / (5(1−q)(q;q)_∞)`; fails in rings where 5 is not a unit.
pub fn t_series<C: Coeff>(order: usize) -> Result<Fps<C>> {
    let fifth = C::from_i64(5)
        .inverse()
        .ok_or_else(|| Error::NonUnitConstantTerm("5".into()))?;
    Ok(t_series_times_five::<C>(order).scale(&fifth))
}

/// Left side of the two Lambert identities for `R_1..R_4`:
/// variant 1 is `R_1 + R_2 − R_3 − R_4`, variant 2 is `R_1 − 2R_2 + 2R_3 − R_4`.
pub fn lemma23_lhs<C: Coeff>(variant: u8, order: usize) -> Result<Fps<C>> {
    let weights: [i64; 4] = match variant {
        1 => [1, 1, -1, -1],
        2 => [1, -2, 2, -1],
        v => return Err(Error::InvalidArgument(format!("unknown variant {v}"))),
    };
    let mut out = Fps::zero(order);
    for (i, w) in weights.iter().enumerate() {
        out = &out + &r_series::<C>(i + 1, order).scale_i64(*w);
    }
    Ok(out)
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `(q²,q³,q⁵;q⁵)²/(q,q⁴;q⁵)³` and `q(q,q⁴,q⁵;q⁵)²/(q²,q³;q⁵)³`.
pub fn lemma23_products(order: usize) -> (Fps<Rational>, Fps<Rational>) {
    let x1 = pochhammer::<BigInt>(
        &PochSpec::new().tuple(&[2, 3, 5], 5, 2).tuple(&[1, 4], 5, -3),
        order,
    )
    .expect("unit denominators");
    let x2 = pochhammer::<BigInt>(
        &PochSpec::new().tuple(&[1, 4, 5], 5, 2).tuple(&[2, 3], 5, -3),
        order,
    )
    .expect("unit denominators")
    .shift(1);
    (x1.to_rational(), x2.to_rational())
}

/// Product side of the two Lambert identities for `R_1..R_4`.
pub fn lemma23_rhs(variant: u8, order: usize) -> Result<Fps<Rational>> {
    let (c1, c2, c0) = match variant {
        1 => (ratio(2, 5), ratio(-1, 5), ratio(-2, 5)),
        2 => (ratio(1, 10), ratio(7, 10), ratio(-1, 10)),
        v => return Err(Error::InvalidArgument(format!("unknown variant {v}"))),
    };
    let (x1, x2) = lemma23_products(order);
    Ok(&(&x1.scale(&c1) + &x2.scale(&c2)) + &Fps::constant(c0, order))
}

/// `(q;q)_∞ / ((ζ^j q;q)_∞ (ζ^{−j} q;q)_∞)` by direct product expansion.
pub fn crank_quotient_direct<C: Coeff>(j: i64, order: usize) -> Fps<Cyclo<C>> {
    let mut out = Fps::<Cyclo<C>>::one(order);
    let one = Cyclo::<C>::one();
    for n in 1..=order {
        out.mul_one_minus(&one, n);
        for k in [j, -j] {
            let coeffs = out.coeffs_mut();
            for e in n..=order {
                let (lo, hi) = coeffs.split_at_mut(e);
                let prev = &lo[e - n];
                if !prev.is_zero() {
                    hi[0].add_assign_ref(&prev.mul_zeta_pow(k));
                }
            }
        }
    }
    out
}

/// `A(q⁵) − (ζ^m+ζ^{−m})² q B(q⁵) + (ζ^{2m}+ζ^{−2m}) q² C(q⁵) − (ζ^m+ζ^{−m}) q³ D(q⁵)`
/// from given `A, B, C, D`.
pub fn crank_quotient_dissected<C: Coeff>(
    m: i64,
    abcd: &[Fps<C>; 4],
    order: usize,
) -> Fps<Cyclo<C>> {
    let c1 = Cyclo::<C>::zeta(m).add_ref(&Cyclo::zeta(-m));
    let c2 = Cyclo::<C>::zeta(2 * m).add_ref(&Cyclo::zeta(-2 * m));
    let weights = [
        Cyclo::<C>::one(),
        c1.mul_ref(&c1).neg_ref(),
        c2,
        c1.neg_ref(),
    ];
    let mut out = Fps::<Cyclo<C>>::zero(order);
    for (k, (series, w)) in abcd.iter().zip(weights).enumerate() {
        let spread = series.inflate_to(5, order).map(|c| Cyclo::from_base(c.clone()));
        out = &out + &spread.scale(&w).shift(k);
    }
    out
}

/// `Σ_{n≥1} ζ^{−j}qⁿ/(1−ζ^{−j}qⁿ) − S(q)`, expanded through the `R_i`:
/// `R_5 − S + Σ_{i=1..4} ζ^{−ij} R_i`.
pub fn crank_inner_sum<C: Coeff>(j: i64, order: usize) -> Fps<Cyclo<C>> {
    let lift = |f: Fps<C>| f.map(|c| Cyclo::from_base(c.clone()));
    let mut out = lift(&r_series::<C>(5, order) - &s_series::<C>(order));
    for i in 1..=4 {
        let zeta = Cyclo::<C>::zeta(-(i as i64) * j);
        out = &out + &lift(r_series::<C>(i, order)).scale(&zeta);
    }
    out
}

/// The same inner sum from its definition: coefficient of `q^N` is
/// `Σ_{k | N} ζ^{−jk}` minus `S[N]`.
pub fn crank_inner_sum_direct<C: Coeff>(j: i64, order: usize) -> Fps<Cyclo<C>> {
    let mut out = Fps::<Cyclo<C>>::zero(order);
    let coeffs = out.coeffs_mut();
    for k in 1..=order {
        let z = Cyclo::<C>::zeta(-j * k as i64);
        for e in (k..=order).step_by(k) {
            coeffs[e].add_assign_ref(&z);
        }
    }
    let s = s_series::<C>(order).map(|c| Cyclo::from_base(c.clone()));
    &out - &s
}

/// One term of the roots-of-unity filter for the ω-weighted crank:
/// `(q;q)_∞/((ζ^j q;q)_∞(q/ζ^j;q)_∞) · (Σ ζ^{−j}qⁿ/(1−ζ^{−j}qⁿ) − S(q))`.
pub fn weighted_crank_component_in<C: Coeff>(j: i64, order: usize) -> Fps<Cyclo<C>> {
    crank_quotient_direct::<C>(j, order).mul(&crank_inner_sum::<C>(j, order))
}

pub fn weighted_crank_component(j: i64, order: usize) -> Result<Fps<CycloElem>> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!("need 1 ≤ j ≤ 4, got {j}")));
    }
    Ok(weighted_crank_component_in::<BigInt>(j, order)
        .map(|c| c.map(|v| Rational::from_integer(v.clone()))))
}

/// Coefficients of `R_1..R_5, S` inside each bracket of the closed forms for
/// `Σ M_ω(b,5,n) qⁿ`, listed for the `D`, `C`, `B`, `A` brackets (multipliers
/// `q³/5·D(q⁵)`, `q²/5·C(q⁵)`, `q/5·B(q⁵)`, `1/5·A(q⁵)`).
pub const MOMEGA_BRACKETS: [[[i64; 6]; 4]; 5] = [
    [
        [-3, 2, 2, -3, 2, -2],
        [-2, 3, 3, -2, -2, 2],
        [4, -1, -1, 4, -6, 6],
        [-1, -1, -1, -1, 4, -4],
    ],
    [
        [2, 2, -3, 2, -3, 3],
        [3, 3, -2, -2, -2, 2],
        [-1, -1, 4, -6, 4, -4],
        [-1, -1, -1, 4, -1, 1],
    ],
    [
        [2, -3, 2, -3, 2, -2],
        [3, -2, -2, -2, 3, -3],
        [-1, 4, -6, 4, -1, 1],
        [-1, -1, 4, -1, -1, 1],
    ],
    [
        [-3, 2, -3, 2, 2, -2],
        [-2, -2, -2, 3, 3, -3],
        [4, -6, 4, -1, -1, 1],
        [-1, 4, -1, -1, -1, 1],
    ],
    [
        [2, -3, 2, 2, -3, 3],
        [-2, -2, 3, 3, -2, 2],
        [-6, 4, -1, -1, 4, -4],
        [4, -1, -1, -1, -1, 1],
    ],
];

/// `Σ_{k=0..3} q^k·G_k(q⁵)·bracket_k` with `G = [A, B, C, D]`.
pub fn garvan_form<C: Coeff>(abcd: &[Fps<C>; 4], brackets: &[Fps<C>; 4], order: usize) -> Fps<C> {
    let mut out = Fps::<C>::zero(order);
    for (k, (g, bracket)) in abcd.iter().zip(brackets).enumerate() {
        out = &out + &g.inflate_to(5, order).mul(bracket).shift(k);
    }
    out
}

/// `5·Σ M_ω(b,5,n)qⁿ` from the closed form in `A..D`, `R_i`, `S`, `T`,
/// over any ring (no division by 5 needed).
pub fn momega_closed_form_times_five<C: Coeff>(
    b: usize,
    abcd: &[Fps<C>; 4],
    order: usize,
) -> Fps<C> {
    let rs: Vec<Fps<C>> = (1..=5)
        .map(|i| r_series::<C>(i, order))
        .chain(std::iter::once(s_series::<C>(order)))
        .collect();
    let bracket = |weights: &[i64; 6]| {
        rs.iter()
            .zip(weights)
            .fold(Fps::<C>::zero(order), |acc, (f, &w)| &acc + &f.scale_i64(w))
    };
    // the table lists D, C, B, A
    let rows = &MOMEGA_BRACKETS[b];
    let brackets = [bracket(&rows[3]), bracket(&rows[2]), bracket(&rows[1]), bracket(&rows[0])];
    &t_series_times_five::<C>(order) + &garvan_form(abcd, &brackets, order)
}

/// Closed form for `Σ M_ω(b,5,n)qⁿ` over the rationals.
pub fn momega_closed_form(b: usize, abcd: &[Fps<Rational>; 4], order: usize) -> Fps<Rational> {
    momega_closed_form_times_five(b, abcd, order).scale(&ratio(1, 5))
}

/// `[A, B, C, D]` over `C` to the given order.
pub fn garvan_all<C: Coeff>(order: usize) -> [Fps<C>; 4] {
    Garvan::ALL.map(|g| named_series::<C>(g, order))
}
