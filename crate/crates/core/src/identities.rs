//! Registry of named checks. Each check expands both sides of an identity
//! (or the residues of a congruence) and compares them coefficient by
//! coefficient up to the requested order.
//!
//! For identities about `5n + a` subsequences, `order` bounds `n`, so the
//! underlying full series are built to `5·order + a`. Table-backed checks use
//! `n ≤ min(order, table_max)`.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fps::Fps;
use crate::partitions::{momega_gf2, momega_int, rank_nt_dp, stat_table_with_cap, StatTable};
use crate::qseries::{
    crank_quotient_direct, crank_quotient_dissected, eta_quotient_5n4, garvan_all, garvan_form,
    lambert_master, lambert_master_lhs, lambert_one_sided, lemma23_lhs, lemma23_rhs,
    momega_closed_form_times_five, pochhammer, r_series, PochSpec,
};
use crate::ring::{Coeff, Gf2, Rational};

pub const DEFAULT_TABLE_MAX: usize = 45;
pub const DEFAULT_MASTER_INSTANCES: usize = 20;
pub const DEFAULT_SEED: u64 = 20_240_501;

/// How many leading coefficients each report keeps.
const SAMPLE_LEN: usize = 8;

/// Every registry id in reporting order.
pub const IDS: &[&str] = &[
    "L2.1.m1",
    "L2.1.m2",
    "L2.2.a",
    "L2.2.b",
    "L2.2.c",
    "L2.2.d",
    "L2.2.e",
    "L2.2.f",
    "L2.2.g",
    "L2.2.h",
    "L2.2.i",
    "L2.2.master",
    "L2.3.a",
    "L2.3.b",
    "T3.1.b0",
    "T3.1.b1",
    "T3.1.b2",
    "T3.1.b3",
    "T3.1.b4",
    "E4.1",
    "E4.3",
    "E4.4",
    "E4.5",
    "E4.7",
    "E4.9",
    "E4.10",
    "E4.12",
    "E4.13",
    "T1.a",
    "T1.b",
    "T2",
    "T3",
    "T4",
    "INTRO.beck",
    "INTRO.chern",
    "INTRO.mao7.a",
    "INTRO.mao7.b",
    "INTRO.dyson.5",
    "INTRO.dyson.7",
    "C5.1",
    "C5.2",
    "C5.3",
];

/// One comparison inside a check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartReport {
    pub label: String,
    pub order: usize,
    pub first_mismatch: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub order: usize,
    pub passed: bool,
    /// Index of the first differing coefficient in the first failing part.
    pub first_mismatch: Option<usize>,
    pub lhs_sample: Vec<String>,
    pub rhs_sample: Vec<String>,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
    pub parts: Vec<PartReport>,
    /// Set when the check could not be evaluated at all.
    pub error: Option<String>,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

struct Comparison {
    part: PartReport,
    lhs: Vec<String>,
    rhs: Vec<String>,
}

fn sample<C: Coeff>(f: &Fps<C>) -> Vec<String> {
    f.coeffs().iter().take(SAMPLE_LEN).map(ToString::to_string).collect()
}

fn compare<C: Coeff>(label: impl Into<String>, lhs: &Fps<C>, rhs: &Fps<C>, order: usize) -> Result<Comparison> {
    Ok(Comparison {
        part: PartReport {
            label: label.into(),
            order,
            first_mismatch: lhs.first_mismatch(rhs, order)?,
        },
        lhs: sample(&lhs.truncate(order)),
        rhs: sample(&rhs.truncate(order)),
    })
}

fn assemble(id: &str, order: usize, parts: Vec<Comparison>, elapsed: Duration) -> IdentityReport {
    let failing = parts.iter().find(|c| c.part.first_mismatch.is_some());
    let shown = failing.or(parts.first());
    IdentityReport {
        id: id.to_string(),
        order,
        passed: failing.is_none(),
        first_mismatch: failing.and_then(|c| c.part.first_mismatch),
        lhs_sample: shown.map(|c| c.lhs.clone()).unwrap_or_default(),
        rhs_sample: shown.map(|c| c.rhs.clone()).unwrap_or_default(),
        elapsed,
        parts: parts.into_iter().map(|c| c.part).collect(),
        error: None,
    }
}

/// Builds `[A, B, C, D]` to a given order; swappable for fault injection.
pub type GarvanBuilder = fn(usize) -> [Fps<BigInt>; 4];

#[derive(Debug, Clone)]
pub struct Settings {
    pub table_max: usize,
    pub master_instances: usize,
    pub seed: u64,
    pub garvan: GarvanBuilder,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            table_max: DEFAULT_TABLE_MAX,
            master_instances: DEFAULT_MASTER_INSTANCES,
            seed: DEFAULT_SEED,
            garvan: garvan_all::<BigInt>,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub settings: Settings,
}

/// Rank and NT residue series from the Durfee DP.
type RankNt = (Vec<Fps<BigInt>>, Vec<Fps<BigInt>>);

/// Shared, lazily built data for one run at one order.
struct Context<'a> {
    order: usize,
    settings: &'a Settings,
    garvan: OnceLock<[Fps<BigInt>; 4]>,
    momega: OnceLock<Result<Vec<Fps<BigInt>>>>,
    dp5: OnceLock<RankNt>,
    dp7: OnceLock<RankNt>,
    enum5: OnceLock<Result<StatTable>>,
    enum7: OnceLock<Result<StatTable>>,
}

impl<'a> Context<'a> {
    fn new(order: usize, settings: &'a Settings) -> Self {
        Context {
            order,
            settings,
            garvan: OnceLock::new(),
            momega: OnceLock::new(),
            dp5: OnceLock::new(),
            dp7: OnceLock::new(),
            enum5: OnceLock::new(),
            enum7: OnceLock::new(),
        }
    }

    /// Full-series order that covers `5n + 4` for `n ≤ order`.
    fn full5(&self) -> usize {
        5 * self.order + 4
    }

    fn full7(&self) -> usize {
        7 * self.order + 6
    }

    fn table_n(&self) -> usize {
        self.order.min(self.settings.table_max)
    }

    fn garvan(&self) -> &[Fps<BigInt>; 4] {
        self.garvan.get_or_init(|| (self.settings.garvan)(self.order))
    }

    fn momega(&self) -> Result<&Vec<Fps<BigInt>>> {
        self.momega
            .get_or_init(|| momega_int(self.full5()))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn nt5(&self) -> &Vec<Fps<BigInt>> {
        &self.dp5.get_or_init(|| rank_nt_dp(5, self.full5())).1
    }

    fn rank5(&self) -> &Vec<Fps<BigInt>> {
        &self.dp5.get_or_init(|| rank_nt_dp(5, self.full5())).0
    }

    fn nt7(&self) -> &Vec<Fps<BigInt>> {
        &self.dp7.get_or_init(|| rank_nt_dp(7, self.full7())).1
    }

    fn rank7(&self) -> &Vec<Fps<BigInt>> {
        &self.dp7.get_or_init(|| rank_nt_dp(7, self.full7())).0
    }

    fn enum_table(&self, j: usize) -> Result<&StatTable> {
        let cell = if j == 5 { &self.enum5 } else { &self.enum7 };
        let max = self.settings.table_max;
        cell.get_or_init(|| stat_table_with_cap(max, j, max))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Builds whatever the given checks will need, a few resources at a time,
    /// before the checks themselves run in parallel.
    fn warm(&self, ids: &[&str]) {
        let any = |prefixes: &[&str]| ids.iter().any(|id| prefixes.iter().any(|p| id.starts_with(p)));
        std::thread::scope(|scope| {
            if any(&["T3.1", "E4", "T1", "T2", "T3", "T4", "INTRO.chern", "C5"]) {
                scope.spawn(|| {
                    let _ = self.momega();
                });
            }
            if any(&["E4.4", "E4.10", "E4.13", "T1", "T3", "T4", "INTRO.beck", "INTRO.dyson.5"]) {
                scope.spawn(|| self.nt5());
            }
            if any(&["INTRO.mao7", "INTRO.dyson.7"]) {
                scope.spawn(|| self.nt7());
            }
            if any(&["T3.1", "E4.4", "T1", "T2", "T3", "T4", "INTRO.dyson.5"]) {
                scope.spawn(|| {
                    let _ = self.enum_table(5);
                });
            }
            if any(&["INTRO.dyson.7"]) {
                scope.spawn(|| {
                    let _ = self.enum_table(7);
                });
            }
            if any(&["L2.1", "T3.1", "E4"]) {
                scope.spawn(|| self.garvan());
            }
        });
    }
}

fn momega_diff(ctx: &Context, a: usize, b: usize) -> Result<Fps<BigInt>> {
    let m = ctx.momega()?;
    Ok(&m[a] - &m[b])
}

fn nt5_diff(ctx: &Context, a: usize, b: usize) -> Fps<BigInt> {
    let nt = ctx.nt5();
    &nt[a] - &nt[b]
}

fn to_rat(f: &Fps<BigInt>) -> Fps<Rational> {
    f.to_rational()
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn quotient(num: &[(usize, i32)], den: &[(usize, i32)], base: usize, order: usize) -> Fps<BigInt> {
    let mut spec = PochSpec::new();
    for &(a, p) in num {
        spec = spec.with(a, base, p);
    }
    for &(a, p) in den {
        spec = spec.with(a, base, -p);
    }
    pochhammer(&spec, order).expect("quotients with unit denominators")
}

/// `Σ_n c(n) qⁿ ↦ (c(n) mod p)`, for congruence checks.
fn residues(f: &Fps<BigInt>, p: i64) -> Fps<BigInt> {
    let p = BigInt::from(p);
    f.map(|c| c.mod_floor(&p))
}

/// `(r, s, t)` for the nine instances a–i, with the stated product sides.
fn lambert_instance(letter: char, order: usize) -> Option<((usize, usize, usize), Fps<BigInt>)> {
    let zero = Fps::zero(order);
    Some(match letter {
        'a' => ((1, 1, 0), quotient(&[(2, 1), (3, 1), (5, 2)], &[(1, 2), (4, 2)], 5, order)),
        'b' => ((2, 3, 1), zero),
        'c' => ((1, 2, 0), quotient(&[(5, 2)], &[(1, 1), (4, 1)], 5, order)),
        'd' => ((2, 2, 0), quotient(&[(1, 1), (4, 1), (5, 2)], &[(2, 2), (3, 2)], 5, order)),
        'e' => ((1, 3, 0), quotient(&[(5, 2)], &[(2, 1), (3, 1)], 5, order)),
        'f' => ((2, 4, 1), quotient(&[(5, 2)], &[(2, 1), (3, 1)], 5, order).neg()),
        'g' => ((1, 4, 0), zero),
        'h' => ((2, 1, 0), quotient(&[(5, 2)], &[(1, 1), (4, 1)], 5, order)),
        'i' => (
            (2, 2, 1),
            quotient(&[(1, 1), (4, 1), (5, 2)], &[(2, 2), (3, 2)], 5, order).shift(1),
        ),
        _ => return None,
    })
}

fn lhs(r: usize, s: usize, t: usize, order: usize) -> Fps<BigInt> {
    lambert_master_lhs(r, s, t, order).expect("registry instances are in range")
}

fn lam(slope: usize, offset: usize, residue: usize, order: usize) -> Fps<BigInt> {
    lambert_one_sided(slope, offset, residue, order).expect("registry sums are well formed")
}

/// `A..D` in `q` (not `q⁵`) at the check order.
fn garvan_q(ctx: &Context) -> [Fps<BigInt>; 4] {
    ctx.garvan().clone().map(|g| g.truncate(ctx.order))
}

/// `(4-1)`-type full series from the `A, B, C, D` brackets.
fn full_series_rhs(ctx: &Context, brackets: [[i64; 4]; 4]) -> Fps<BigInt> {
    let order = ctx.order;
    let rs: Vec<Fps<BigInt>> = (1..=4).map(|i| r_series(i, order)).collect();
    let combo = |w: &[i64; 4]| {
        rs.iter()
            .zip(w)
            .fold(Fps::zero(order), |acc, (f, &c)| &acc + &f.scale_i64(c))
    };
    let brackets = brackets.map(|w| combo(&w));
    garvan_form(ctx.garvan(), &brackets, order)
}

fn e43_middle(ctx: &Context) -> Fps<BigInt> {
    let n = ctx.order;
    let [a, b, c, d] = garvan_q(ctx);
    let terms = [
        d.mul(&lhs(1, 1, 0, n)),
        d.mul(&lhs(2, 3, 1, n)).neg(),
        c.mul(&lhs(1, 2, 0, n)),
        b.mul(&lhs(1, 3, 0, n)).neg(),
        b.mul(&lhs(2, 4, 1, n)).scale_i64(2),
        a.mul(&lhs(2, 2, 0, n)).neg(),
    ];
    terms.iter().fold(Fps::zero(n), |acc, t| &acc + t)
}

fn e47_middle(ctx: &Context) -> Fps<BigInt> {
    let n = ctx.order;
    let [a, b, c, d] = garvan_q(ctx);
    let terms = [
        d.mul(&lhs(2, 3, 1, n)),
        c.mul(&lhs(1, 2, 0, n)),
        c.mul(&lhs(2, 1, 0, n)),
        b.mul(&lhs(1, 3, 0, n)),
        b.mul(&lhs(2, 4, 1, n)).neg(),
        a.mul(&lhs(1, 4, 0, n)).neg(),
    ];
    terms.iter().fold(Fps::zero(n), |acc, t| &acc + t)
}

fn e49_middle(ctx: &Context) -> Fps<BigInt> {
    let n = ctx.order;
    let [a, b, c, d] = garvan_q(ctx);
    let terms = [
        d.mul(&lhs(2, 2, 1, n)),
        c.mul(&lemma23_lhs(1, n).expect("variant 1")),
        b.mul(&lhs(1, 1, 0, n)),
        b.mul(&lhs(2, 3, 1, n)).neg(),
        a.mul(&lhs(1, 2, 0, n)).neg(),
    ];
    terms.iter().fold(Fps::zero(n), |acc, t| &acc + t)
}

/// `(4/5)q(q,q⁴)²(q⁵)³/(q²,q³)⁴ + (2/5)(q²,q³)(q⁵)³/(q,q⁴)³ − (2/5)(q⁵)/(q²,q³)`, base `q⁵`.
fn e49_rhs(order: usize) -> Fps<Rational> {
    let t1 = quotient(&[(1, 2), (4, 2), (5, 3)], &[(2, 4), (3, 4)], 5, order).shift(1);
    let t2 = quotient(&[(2, 1), (3, 1), (5, 3)], &[(1, 3), (4, 3)], 5, order);
    let t3 = quotient(&[(5, 1)], &[(2, 1), (3, 1)], 5, order);
    &(&to_rat(&t1).scale(&ratio(4, 5)) + &to_rat(&t2).scale(&ratio(2, 5)))
        - &to_rat(&t3).scale(&ratio(2, 5))
}

fn e412_middle(ctx: &Context) -> Fps<Rational> {
    let n = ctx.order;
    let [a, b, c, d] = garvan_q(ctx);
    let int_terms = [
        d.mul(&(&lam(1, 1, 3, n) - &lam(4, 2, 2, n))),
        d.mul(&(&lam(2, 2, 4, n) - &lam(3, 1, 1, n))).neg(),
        c.mul(&(&lam(1, 1, 4, n) - &lam(4, 1, 1, n))),
        a.mul(&(&lam(2, 1, 3, n) - &lam(3, 1, 2, n))).neg(),
    ];
    let ints = int_terms.iter().fold(Fps::zero(n), |acc, t| &acc + t);
    // the R-combination with weights 1, −2, 2, −1
    let combo = lemma23_lhs::<BigInt>(2, n).expect("variant 2");
    to_rat(&(&ints - &b.mul(&combo)))
}

/// `(1/10)(q⁵)/(q,q⁴) − (1/10)(q²,q³)²(q⁵)³/(q,q⁴)⁴ + (13/10)q(q,q⁴)(q⁵)³/(q²,q³)³`, base `q⁵`.
fn e412_rhs(order: usize) -> Fps<Rational> {
    let t1 = quotient(&[(5, 1)], &[(1, 1), (4, 1)], 5, order);
    let t2 = quotient(&[(2, 2), (3, 2), (5, 3)], &[(1, 4), (4, 4)], 5, order);
    let t3 = quotient(&[(1, 1), (4, 1), (5, 3)], &[(2, 3), (3, 3)], 5, order).shift(1);
    &(&to_rat(&t1).scale(&ratio(1, 10)) - &to_rat(&t2).scale(&ratio(1, 10)))
        + &to_rat(&t3).scale(&ratio(13, 10))
}

/// Table-range slice `(series)[5n + a]` for `n ≤ table_n`.
fn table_slice(ctx: &Context, f: &Fps<BigInt>, a: usize) -> Fps<BigInt> {
    f.dissect(a).truncate(ctx.table_n())
}

/// Compares a DP/GF-built full series with the enumeration table on their overlap.
fn against_enumeration(
    label: &str,
    fast: &Fps<BigInt>,
    table: &[BigInt],
) -> Result<Comparison> {
    let n = (table.len() - 1).min(fast.order());
    let oracle = Fps::from_coeffs(table[..=n].to_vec());
    compare(label, fast, &oracle, n)
}

fn check(ctx: &Context, id: &str) -> Result<Vec<Comparison>> {
    let n = ctx.order;
    let tn = ctx.table_n();
    let eta = || eta_quotient_5n4::<BigInt>(n);
    match id {
        "L2.1.m1" | "L2.1.m2" => {
            let m = if id.ends_with('1') { 1 } else { 2 };
            let direct = crank_quotient_direct::<BigInt>(m, n);
            let dissected = crank_quotient_dissected(m, ctx.garvan(), n);
            Ok(vec![compare("product vs dissection", &direct, &dissected, n)?])
        }
        "L2.2.master" => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.settings.seed);
            let mut out = Vec::new();
            while out.len() < ctx.settings.master_instances {
                let (r, s) = (rng.gen_range(1..=4usize), rng.gen_range(1..=4usize));
                if r + s == 5 {
                    continue;
                }
                let t = rng.gen_range((r + s).saturating_sub(5)..=4usize);
                let (l, rhs) = lambert_master::<BigInt>(r, s, t, n)?;
                out.push(compare(format!("({r},{s},{t})"), &l, &rhs, n)?);
            }
            Ok(out)
        }
        _ if id.starts_with("L2.2.") => {
            let letter = id.chars().last().unwrap_or('?');
            let ((r, s, t), stated) =
                lambert_instance(letter, n).ok_or_else(|| Error::UnknownIdentity(id.into()))?;
            let l = lhs(r, s, t, n);
            let mut out = vec![compare("sums vs stated product", &l, &stated, n)?];
            match lambert_master::<BigInt>(r, s, t, n) {
                Ok((_, general)) => out.push(compare("sums vs general product", &l, &general, n)?),
                Err(Error::DegenerateProduct { .. }) => {}
                Err(e) => return Err(e),
            }
            Ok(out)
        }
        "L2.3.a" | "L2.3.b" => {
            let variant = if id.ends_with('a') { 1 } else { 2 };
            let l = to_rat(&lemma23_lhs::<BigInt>(variant, n)?);
            Ok(vec![compare("R-combination vs products", &l, &lemma23_rhs(variant, n)?, n)?])
        }
        _ if id.starts_with("T3.1.b") => {
            let b: usize = id[6..].parse().map_err(|_| Error::UnknownIdentity(id.into()))?;
            let closed = momega_closed_form_times_five(b, ctx.garvan(), n);
            let five = BigInt::from(5);
            let filtered = ctx.momega()?[b].truncate(n).map(|c| c * &five);
            let table = ctx.enum_table(5)?;
            let oracle = Fps::from_coeffs(table.momega.as_ref().expect("enumeration fills M_ω")[b].clone())
                .map(|c| c * &five);
            let k = n.min(oracle.order());
            Ok(vec![
                compare("closed form vs enumeration", &closed, &oracle, k)?,
                compare("closed form vs filter", &closed, &filtered, n)?,
            ])
        }
        "E4.1" => {
            let l = momega_diff(ctx, 2, 3)?;
            let r = full_series_rhs(ctx, [[0, -1, 1, 0], [-1, 2, -2, 1], [1, 0, 0, -1], [1, -1, 1, -1]]);
            Ok(vec![compare("M_ω(2)−M_ω(3)", &l, &r, n)?])
        }
        "E4.5" => {
            let l = momega_diff(ctx, 1, 4)?;
            let r = full_series_rhs(ctx, [[-1, 0, 0, 1], [1, -1, 1, -1], [1, 1, -1, -1], [0, 1, -1, 0]]);
            Ok(vec![compare("M_ω(1)−M_ω(4)", &l, &r, n)?])
        }
        "E4.3" => {
            let l = momega_diff(ctx, 2, 3)?.dissect(4);
            let mid = e43_middle(ctx);
            let r = eta().scale_i64(-2);
            Ok(vec![
                compare("5n+4 part vs Lambert form", &l, &mid, n)?,
                compare("Lambert form vs product", &mid, &r, n)?,
            ])
        }
        "E4.4" => {
            let full = nt5_diff(ctx, 1, 4);
            let table = ctx.enum_table(5)?;
            let oracle: Vec<BigInt> = (0..=table.max_n).map(|k| &table.nt[1][k] - &table.nt[4][k]).collect();
            Ok(vec![
                against_enumeration("recurrence vs enumeration", &full, &oracle)?,
                compare("5n+4 part vs product", &full.dissect(4), &eta().neg(), n)?,
            ])
        }
        "E4.7" => {
            let l = momega_diff(ctx, 1, 4)?.dissect(4);
            let mid = e47_middle(ctx);
            Ok(vec![
                compare("5n+4 part vs Lambert form", &l, &mid, n)?,
                compare("Lambert form vs product", &mid, &eta().scale_i64(4), n)?,
            ])
        }
        "E4.9" => {
            let l = to_rat(&momega_diff(ctx, 1, 4)?.dissect(2));
            let mid = to_rat(&e49_middle(ctx));
            Ok(vec![
                compare("5n+2 part vs Lambert form", &l, &mid, n)?,
                compare("Lambert form vs products", &mid, &e49_rhs(n), n)?,
            ])
        }
        "E4.10" => {
            let l = to_rat(&nt5_diff(ctx, 2, 3).dissect(2).scale_i64(2));
            Ok(vec![compare("5n+2 part vs products", &l, &e49_rhs(n).neg(), n)?])
        }
        "E4.12" => {
            let l = to_rat(&momega_diff(ctx, 2, 3)?.dissect(1));
            let mid = e412_middle(ctx);
            Ok(vec![
                compare("5n+1 part vs Lambert form", &l, &mid, n)?,
                compare("Lambert form vs products", &mid, &e412_rhs(n), n)?,
            ])
        }
        "E4.13" => {
            let l = to_rat(&nt5_diff(ctx, 2, 3).dissect(1));
            Ok(vec![compare("5n+1 part vs products", &l, &e412_rhs(n), n)?])
        }
        "T1.a" => {
            let l = &nt5_diff(ctx, 1, 4) + &momega_diff(ctx, 2, 3)?.scale_i64(2);
            Ok(vec![compare("5n+4 part vs product", &l.dissect(4), &eta().scale_i64(-5), n)?])
        }
        "T1.b" => {
            let l = table_slice(ctx, &momega_diff(ctx, 2, 3)?, 4);
            let r = table_slice(ctx, &nt5_diff(ctx, 1, 4).scale_i64(2), 4);
            Ok(vec![
                compare("tables at 5n+4", &l, &r, tn)?,
                enumeration_overlap(ctx, &momega_diff(ctx, 2, 3)?, |t, k| {
                    momega_cell(t, 2, k) - momega_cell(t, 3, k)
                })?,
            ])
        }
        "T2" => {
            let l = table_slice(ctx, &momega_diff(ctx, 1, 4)?, 4);
            let r = table_slice(ctx, &momega_diff(ctx, 3, 2)?.scale_i64(2), 4);
            let e43 = momega_diff(ctx, 2, 3)?.dissect(4);
            let e47 = momega_diff(ctx, 1, 4)?.dissect(4);
            Ok(vec![
                compare("tables at 5n+4", &l, &r, tn)?,
                compare("5n+4 series: (1,4) part = −2·(2,3) part", &e47, &e43.scale_i64(-2), n)?,
                enumeration_overlap(ctx, &momega_diff(ctx, 1, 4)?, |t, k| {
                    momega_cell(t, 1, k) - momega_cell(t, 4, k)
                })?,
            ])
        }
        "T3" => {
            let m = momega_diff(ctx, 1, 4)?;
            let nt = nt5_diff(ctx, 3, 2).scale_i64(2);
            Ok(vec![
                compare("tables at 5n+2", &table_slice(ctx, &m, 2), &table_slice(ctx, &nt, 2), tn)?,
                compare("5n+2 series", &m.dissect(2), &nt.dissect(2), n)?,
                enumeration_overlap(ctx, &nt, |t, k| (&t.nt[3][k] - &t.nt[2][k]) * 2)?,
            ])
        }
        "T4" => {
            let m = momega_diff(ctx, 2, 3)?;
            let nt = nt5_diff(ctx, 2, 3);
            Ok(vec![
                compare("tables at 5n+1", &table_slice(ctx, &m, 1), &table_slice(ctx, &nt, 1), tn)?,
                compare("5n+1 series", &m.dissect(1), &nt.dissect(1), n)?,
            ])
        }
        "INTRO.beck" => {
            let nt = ctx.nt5();
            let weighted = (1..5).fold(Fps::zero(ctx.full5()), |acc, m| &acc + &nt[m].scale_i64(m as i64));
            let mut out = Vec::new();
            for a in [1, 4] {
                let l = residues(&table_slice(ctx, &weighted, a), 5);
                out.push(compare(format!("Σ m·NT(m,5,5n+{a}) mod 5"), &l, &Fps::zero(tn), tn)?);
            }
            Ok(out)
        }
        "INTRO.chern" => {
            let mo = ctx.momega()?;
            let weighted = (1..5).fold(Fps::zero(ctx.full5()), |acc, m| &acc + &mo[m].scale_i64(m as i64));
            let l = residues(&table_slice(ctx, &weighted, 4), 5);
            Ok(vec![compare("Σ m·M_ω(m,5,5n+4) mod 5", &l, &Fps::zero(tn), tn)?])
        }
        "INTRO.mao7.a" => {
            let nt = ctx.nt7();
            let l = &(&nt[1] - &nt[6]) + &(&nt[2] - &nt[5]).scale_i64(3);
            let r = quotient(&[(3, 1), (4, 1), (7, 3)], &[(1, 1), (2, 2), (5, 2), (6, 1)], 7, n).scale_i64(-7);
            Ok(vec![compare("7n+5 part vs product", &l.dissect_by(7, 5), &r, n)?])
        }
        "INTRO.mao7.b" => {
            let nt = ctx.nt7();
            let l = &(&nt[1] - &nt[6]) + &(&nt[3] - &nt[4]).scale_i64(2);
            let r = quotient(&[(3, 2), (4, 2), (7, 3)], &[(1, 1), (2, 3), (5, 3), (6, 1)], 7, n).scale_i64(-7);
            Ok(vec![compare("7n+4 part vs product", &l.dissect_by(7, 4), &r, n)?])
        }
        "INTRO.dyson.5" | "INTRO.dyson.7" => {
            let (j, a) = if id.ends_with('5') { (5usize, 4usize) } else { (7, 5) };
            let ranks = if j == 5 { ctx.rank5() } else { ctx.rank7() };
            let p = ranks.iter().skip(1).fold(ranks[0].clone(), |acc, f| &acc + f);
            let p_slice = p.dissect_by(j, a).truncate(tn);
            let table = ctx.enum_table(j)?;
            let mut out = Vec::new();
            for (m, f) in ranks.iter().enumerate() {
                let l = f.dissect_by(j, a).truncate(tn).scale_i64(j as i64);
                out.push(compare(format!("{j}·N({m},{j},{j}n+{a}) vs p"), &l, &p_slice, tn)?);
                out.push(against_enumeration(&format!("N({m},{j},·) vs enumeration"), f, &table.rank[m])?);
            }
            Ok(out)
        }
        "C5.1" | "C5.2" | "C5.3" => {
            let (a, b, residue, modulus) = match id {
                "C5.1" => (2, 3, 4, 2),
                "C5.2" => (1, 4, 2, 2),
                _ => (1, 4, 4, 4),
            };
            let d = residues(&table_slice(ctx, &momega_diff(ctx, a, b)?, residue), modulus);
            Ok(vec![compare(
                format!("M_ω({a})−M_ω({b}) at 5n+{residue} mod {modulus}"),
                &d,
                &Fps::zero(tn),
                tn,
            )?])
        }
        _ => Err(Error::UnknownIdentity(id.into())),
    }
}

fn momega_cell(t: &StatTable, m: usize, k: usize) -> BigInt {
    t.momega.as_ref().expect("enumeration fills M_ω")[m][k].clone()
}

/// Compares a fast full series with a quantity read off the enumeration table.
fn enumeration_overlap(
    ctx: &Context,
    fast: &Fps<BigInt>,
    cell: impl Fn(&StatTable, usize) -> BigInt,
) -> Result<Comparison> {
    let table = ctx.enum_table(5)?;
    let oracle: Vec<BigInt> = (0..=table.max_n).map(|k| cell(table, k)).collect();
    against_enumeration("fast series vs enumeration", fast, &oracle)
}

impl Registry {
    pub fn new(settings: Settings) -> Self {
        Registry { settings }
    }

    pub fn with_seed(seed: u64) -> Self {
        Registry::new(Settings {
            seed,
            ..Settings::default()
        })
    }

    pub fn ids() -> &'static [&'static str] {
        IDS
    }

    pub fn run_check(&self, id: &str, order: usize) -> Result<IdentityReport> {
        if !IDS.contains(&id) {
            return Err(Error::UnknownIdentity(id.into()));
        }
        let ctx = Context::new(order, &self.settings);
        run_one(&ctx, id)
    }

    /// Runs the given checks (all when empty) in parallel; reports keep the
    /// registry order. Evaluation errors become failed reports.
    pub fn run_many(&self, ids: &[&str], order: usize) -> Result<Vec<IdentityReport>> {
        if let Some(bad) = ids.iter().find(|id| !IDS.contains(id)) {
            return Err(Error::UnknownIdentity((*bad).into()));
        }
        let selected: Vec<&str> = IDS
            .iter()
            .copied()
            .filter(|id| ids.is_empty() || ids.contains(id))
            .collect();
        let ctx = Context::new(order, &self.settings);
        ctx.warm(&selected);
        Ok(selected
            .par_iter()
            .map(|id| {
                run_one(&ctx, id).unwrap_or_else(|e| IdentityReport {
                    id: id.to_string(),
                    order,
                    passed: false,
                    first_mismatch: None,
                    lhs_sample: Vec::new(),
                    rhs_sample: Vec::new(),
                    elapsed: Duration::ZERO,
                    parts: Vec::new(),
                    error: Some(e.to_string()),
                })
            })
            .collect())
    }

    pub fn run_all(&self, order: usize) -> Vec<IdentityReport> {
        self.run_many(&[], order).expect("an empty selection names no unknown ids")
    }
}

fn run_one(ctx: &Context, id: &str) -> Result<IdentityReport> {
    let start = Instant::now();
    let parts = check(ctx, id)?;
    Ok(assemble(id, ctx.order, parts, start.elapsed()))
}

pub fn run_check(id: &str, order: usize) -> Result<IdentityReport> {
    Registry::default().run_check(id, order)
}

pub fn run_all(order: usize) -> Vec<IdentityReport> {
    Registry::default().run_all(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Momega,
    Nt,
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "momega" => Ok(Statistic::Momega),
            "nt" => Ok(Statistic::Nt),
            other => Err(Error::InvalidArgument(format!("unknown statistic `{other}`"))),
        }
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistic::Momega => "momega",
            Statistic::Nt => "nt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub upto: usize,
    pub matches: usize,
    #[serde(serialize_with = "as_string")]
    pub density: Rational,
    #[serde(serialize_with = "as_string")]
    pub target: Rational,
    pub statistic: Statistic,
    pub i: usize,
    pub j: usize,
    pub modulus: usize,
    /// Whether every `k ≤ upto` forced to match by a proved congruence does.
    pub forced_ok: bool,
}

fn as_string<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl DensityRow {
    pub fn density_f64(&self) -> f64 {
        self.matches as f64 / self.upto as f64
    }

    pub fn target_f64(&self) -> f64 {
        let t = &self.target;
        use num_traits::ToPrimitive;
        t.numer().to_f64().unwrap_or(f64::NAN) / t.denom().to_f64().unwrap_or(f64::NAN)
    }
}

/// Conjectured limit of the match density for a residue pair.
pub fn density_target(statistic: Statistic, i: usize, j: usize) -> Rational {
    match (statistic, i, j) {
        (Statistic::Momega, 1, 4) => ratio(3, 10),
        (Statistic::Momega, 2, 3) => ratio(2, 5),
        _ => ratio(1, 2),
    }
}

/// Residues `k mod 5` at which a proved congruence forces a parity match.
fn forced_residues(statistic: Statistic, i: usize, j: usize) -> &'static [usize] {
    match (statistic, i, j) {
        (Statistic::Momega, 2, 3) => &[4],
        (Statistic::Momega, 1, 4) => &[2, 4],
        _ => &[],
    }
}

/// Running fraction of `1 ≤ k ≤ n` with `stat(i,5,k) ≡ stat(j,5,k) (mod 2)`,
/// one row per multiple of `stride` up to `upto`.
pub fn density(
    statistic: Statistic,
    i: usize,
    j: usize,
    modulus: usize,
    upto: usize,
    stride: usize,
    cap: usize,
) -> Result<Vec<DensityRow>> {
    if modulus != 2 {
        return Err(Error::InvalidArgument(format!(
            "only modulus 2 is supported, got {modulus}"
        )));
    }
    if !(i < j && j <= 4) {
        return Err(Error::InvalidArgument(format!("need 0 ≤ i < j ≤ 4, got ({i}, {j})")));
    }
    if upto == 0 || stride == 0 {
        return Err(Error::InvalidArgument("upto and stride must be ≥ 1".into()));
    }
    if upto > cap {
        return Err(Error::BudgetExceeded {
            what: "density upto",
            requested: upto,
            cap,
        });
    }
    let bits: Vec<Fps<Gf2>> = match statistic {
        Statistic::Momega => momega_gf2(upto)?,
        Statistic::Nt => rank_nt_dp::<Gf2>(5, upto).1,
    };
    let forced = forced_residues(statistic, i, j);
    let target = density_target(statistic, i, j);
    let mut rows = Vec::new();
    let (mut matches, mut forced_ok) = (0usize, true);
    for k in 1..=upto {
        let same = bits[i].coeff(k) == bits[j].coeff(k);
        matches += same as usize;
        if forced.contains(&(k % 5)) && !same {
            forced_ok = false;
        }
        if k % stride == 0 || k == upto {
            rows.push(DensityRow {
                upto: k,
                matches,
                density: ratio(matches as i64, k as i64),
                target: target.clone(),
                statistic,
                i,
                j,
                modulus,
                forced_ok,
            });
        }
    }
    Ok(rows)
}

/// Writes density rows as CSV with exact and 6-place decimal columns.
pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "statistic", "i", "j", "modulus", "upto", "matches", "density", "density_decimal", "target",
        "target_decimal", "forced_ok",
    ])
    .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.statistic.to_string(),
            r.i.to_string(),
            r.j.to_string(),
            r.modulus.to_string(),
            r.upto.to_string(),
            r.matches.to_string(),
            r.density.to_string(),
            format!("{:.6}", r.density_f64()),
            r.target.to_string(),
            format!("{:.6}", r.target_f64()),
            r.forced_ok.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
}

/// `A, B, C, D` with `B` perturbed at `q³`; used to check that the harness
/// reports failures.
pub fn corrupted_garvan(order: usize) -> [Fps<BigInt>; 4] {
    let mut g = garvan_all::<BigInt>(order);
    if order >= 3 {
        let b = g[1].coeffs_mut();
        b[3] += 1;
    }
    g
}
