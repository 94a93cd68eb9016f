//! Partition enumeration with rank and crank, residue tables of the Beck
//! statistics, and the fast generating-function paths that replace
//! enumeration at large `n`.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fps::{Fps, Series};
use crate::qseries::{t_series_times_five, weighted_crank_component_in};
use crate::ring::{Coeff, Cyclo, Gf2, Rational, RingTag};

pub const DEFAULT_ENUM_CAP: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionRecord {
    /// Weakly decreasing.
    pub parts: Vec<u32>,
    pub n: u32,
    pub largest: u32,
    pub count: u32,
    pub rank: i64,
    pub ones: u32,
    pub mu: u32,
    pub crank: i64,
}

impl PartitionRecord {
    pub fn from_parts(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        let n = parts.iter().sum();
        let largest = parts.first().copied().unwrap_or(0);
        let count = parts.len() as u32;
        let ones = parts.iter().filter(|&&p| p == 1).count() as u32;
        let mu = parts.iter().filter(|&&p| p > ones).count() as u32;
        let crank = if ones == 0 {
            largest as i64
        } else {
            mu as i64 - ones as i64
        };
        PartitionRecord {
            n,
            largest,
            count,
            rank: largest as i64 - count as i64,
            ones,
            mu,
            crank,
            parts,
        }
    }
}

/// Partitions of `n` in reverse lexicographic order.
pub struct Partitions {
    current: Option<Vec<u32>>,
}

impl Iterator for Partitions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        self.current = successor(&out);
        Some(out)
    }
}

fn successor(parts: &[u32]) -> Option<Vec<u32>> {
    // drop trailing ones, decrement the last part > 1, refill greedily
    let mut next = parts.to_vec();
    let mut freed = 0;
    while next.last() == Some(&1) {
        next.pop();
        freed += 1;
    }
    let last = next.last_mut()?;
    *last -= 1;
    let cap = *last;
    freed += 1;
    while freed > 0 {
        let take = freed.min(cap);
        next.push(take);
        freed -= take;
    }
    Some(next)
}

pub fn partitions_of(n: u32) -> Partitions {
    let first = if n == 0 { Vec::new() } else { vec![n] };
    Partitions {
        current: Some(first),
    }
}

/// Every partition of `n` with its statistics. `n = 0` yields the empty
/// partition with rank 0 and crank 0.
pub fn enumerate(n: u32) -> impl Iterator<Item = PartitionRecord> {
    partitions_of(n).map(PartitionRecord::from_parts)
}

/// Residue tables for modulus `j`, indexed `[m][n]` for `0 ≤ n ≤ max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatTable {
    pub j: usize,
    pub max_n: usize,
    pub p: Vec<BigInt>,
    pub rank: Vec<Vec<BigInt>>,
    pub nt: Vec<Vec<BigInt>>,
    /// Absent when the table was built by a method that cannot produce it.
    pub momega: Option<Vec<Vec<BigInt>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatMethod {
    Enumerate,
    Dp,
    Gf,
}

impl std::str::FromStr for StatMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enum" => Ok(StatMethod::Enumerate),
            "dp" => Ok(StatMethod::Dp),
            "gf" => Ok(StatMethod::Gf),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

fn wrap(value: i64, j: usize) -> usize {
    value.rem_euclid(j as i64) as usize
}

fn check_modulus(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::InvalidArgument("modulus must be ≥ 1".into()));
    }
    Ok(())
}

/// Enumeration-backed table with the default budget.
pub fn stat_table(max_n: usize, j: usize) -> Result<StatTable> {
    stat_table_with_cap(max_n, j, DEFAULT_ENUM_CAP)
}

pub fn stat_table_with_cap(max_n: usize, j: usize, cap: usize) -> Result<StatTable> {
    check_modulus(j)?;
    if max_n > cap {
        return Err(Error::BudgetExceeded {
            what: "enumeration n",
            requested: max_n,
            cap,
        });
    }
    // per n: [p, rank[j], nt[j], momega[j]]
    type Row = (u64, Vec<u64>, Vec<u64>, Vec<u64>);
    let rows: Vec<Row> = (0..=max_n as u32)
        .into_par_iter()
        .map(|n| {
            let (mut p, mut rank, mut nt, mut mo) = (0u64, vec![0u64; j], vec![0u64; j], vec![0u64; j]);
            for rec in enumerate(n) {
                p += 1;
                rank[wrap(rec.rank, j)] += 1;
                nt[wrap(rec.rank, j)] += rec.count as u64;
                mo[wrap(rec.crank, j)] += rec.ones as u64;
            }
            (p, rank, nt, mo)
        })
        .collect();
    let column = |pick: &dyn Fn(&Row) -> &Vec<u64>| -> Vec<Vec<BigInt>> {
        (0..j)
            .map(|m| rows.iter().map(|row| BigInt::from(pick(row)[m])).collect())
            .collect()
    };
    Ok(StatTable {
        j,
        max_n,
        p: rows.iter().map(|row| BigInt::from(row.0)).collect(),
        rank: column(&|row| &row.1),
        nt: column(&|row| &row.2),
        momega: Some(column(&|row| &row.3)),
    })
}

/// Table from the rank/NT recurrence; `M_ω` is filled from the filtered
/// generating function when `j = 5`, required for [`StatMethod::Gf`].
pub fn stat_table_fast(max_n: usize, j: usize, method: StatMethod) -> Result<StatTable> {
    check_modulus(j)?;
    let (rank, nt) = rank_nt_dp::<BigInt>(j, max_n);
    let p = (0..=max_n)
        .map(|n| rank.iter().map(|f| f.coeff(n)).sum())
        .collect();
    let momega = match (j, method) {
        (5, _) => Some(momega_int(max_n)?.into_iter().map(Fps::into_coeffs).collect()),
        (_, StatMethod::Gf) => {
            return Err(Error::InvalidArgument(
                "the M_ω generating function is only available for modulus 5".into(),
            ))
        }
        _ => None,
    };
    Ok(StatTable {
        j,
        max_n,
        p,
        rank: rank.into_iter().map(Fps::into_coeffs).collect(),
        nt: nt.into_iter().map(Fps::into_coeffs).collect(),
        momega,
    })
}

pub fn build_stat_table(max_n: usize, j: usize, method: StatMethod, enum_cap: usize) -> Result<StatTable> {
    match method {
        StatMethod::Enumerate => stat_table_with_cap(max_n, j, enum_cap),
        _ => stat_table_fast(max_n, j, method),
    }
}

const CSV_HEADER: [&str; 6] = ["n", "m", "p", "N", "NT", "Momega"];

impl StatTable {
    pub fn nt_series(&self, m: usize) -> Fps<BigInt> {
        Fps::from_coeffs(self.nt[m].clone())
    }

    pub fn rank_series(&self, m: usize) -> Fps<BigInt> {
        Fps::from_coeffs(self.rank[m].clone())
    }

    pub fn momega_series(&self, m: usize) -> Option<Fps<BigInt>> {
        self.momega.as_ref().map(|t| Fps::from_coeffs(t[m].clone()))
    }

    /// One row per `(n, m)`; an absent `M_ω` column is written empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for n in 0..=self.max_n {
            for m in 0..self.j {
                let mo = self
                    .momega
                    .as_ref()
                    .map(|t| t[m][n].to_string())
                    .unwrap_or_default();
                w.write_record([
                    n.to_string(),
                    m.to_string(),
                    self.p[n].to_string(),
                    self.rank[m][n].to_string(),
                    self.nt[m][n].to_string(),
                    mo,
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<StatTable> {
        let parse_err = |message: String| Error::Parse {
            position: 0,
            message,
        };
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            if rec.len() != CSV_HEADER.len() {
                return Err(parse_err(format!("expected 6 columns, got {}", rec.len())));
            }
            let int = |k: usize| -> Result<BigInt> {
                rec[k]
                    .parse()
                    .map_err(|_| parse_err(format!("bad integer `{}`", &rec[k])))
            };
            let mo = if rec[5].is_empty() { None } else { Some(int(5)?) };
            let n = int(0)?.to_usize().ok_or_else(|| parse_err("bad n".into()))?;
            let m = int(1)?.to_usize().ok_or_else(|| parse_err("bad m".into()))?;
            rows.push((n, m, int(2)?, int(3)?, int(4)?, mo));
        }
        let max_n = rows.iter().map(|r| r.0).max().ok_or_else(|| parse_err("empty table".into()))?;
        let j = rows.iter().map(|r| r.1).max().unwrap_or(0) + 1;
        if rows.len() != (max_n + 1) * j {
            return Err(parse_err("table is not a full n × m grid".into()));
        }
        let zero = || vec![vec![BigInt::from(0); max_n + 1]; j];
        let (mut p, mut rank, mut nt, mut mo) = (vec![BigInt::from(0); max_n + 1], zero(), zero(), zero());
        let has_momega = rows.iter().all(|r| r.5.is_some());
        for (n, m, pv, r, t, o) in rows {
            p[n] = pv;
            rank[m][n] = r;
            nt[m][n] = t;
            if let Some(o) = o {
                mo[m][n] = o;
            }
        }
        Ok(StatTable {
            j,
            max_n,
            p,
            rank,
            nt,
            momega: has_momega.then_some(mo),
        })
    }
}

/// Rank counts `N(m,j,n)` and part totals `NT(m,j,n)` for every residue,
/// through the Durfee-square form of the two-variable rank generating function
/// `Σ_s y^s q^{s²} / ((zq;q)_s (yq/z;q)_s)`: `z` tracks the rank mod `j`,
/// `y` the number of parts, and `NT` is the `y`-derivative at `y = 1`.
pub fn rank_nt_dp<C: Coeff>(j: usize, max_n: usize) -> (Vec<Fps<C>>, Vec<Fps<C>>) {
    assert!(j >= 1);
    let width = max_n + 1;
    let idx = |n: usize, r: usize| n * j + r;
    // value and y-derivative of 1/((zq;q)_s (yq/z;q)_s) at y = 1
    let mut val = vec![C::zero(); width * j];
    let mut der = vec![C::zero(); width * j];
    val[idx(0, 0)] = C::one();
    let mut rank = vec![vec![C::zero(); width]; j];
    let mut nt = vec![vec![C::zero(); width]; j];
    rank[0][0] = C::one();
    let mut s = 1;
    while s * s <= max_n {
        let span = max_n - s * s;
        // divide by (1 − z q^s)
        for n in s..=span {
            for r in 0..j {
                let src = idx(n - s, (r + j - 1) % j);
                let (v, d) = (val[src].clone(), der[src].clone());
                val[idx(n, r)].add_assign_ref(&v);
                der[idx(n, r)].add_assign_ref(&d);
            }
        }
        // divide by (1 − y z⁻¹ q^s); ascending n keeps the sources final
        for n in s..=span {
            for r in 0..j {
                let src = idx(n - s, (r + 1) % j);
                let (v, d) = (val[src].clone(), der[src].clone());
                val[idx(n, r)].add_assign_ref(&v);
                der[idx(n, r)].add_assign_ref(&d);
                der[idx(n, r)].add_assign_ref(&v);
            }
        }
        let weight = C::from_i64(s as i64);
        for n in 0..=span {
            for r in 0..j {
                let v = &val[idx(n, r)];
                if v.is_zero() {
                    continue;
                }
                rank[r][n + s * s].add_assign_ref(v);
                nt[r][n + s * s].add_assign_ref(&v.mul_ref(&weight));
                nt[r][n + s * s].add_assign_ref(&der[idx(n, r)]);
            }
        }
        s += 1;
    }
    (
        rank.into_iter().map(Fps::from_coeffs).collect(),
        nt.into_iter().map(Fps::from_coeffs).collect(),
    )
}

/// `Σ_n NT(m,j,n) qⁿ` for every residue `m`, without enumeration.
pub fn nt_dp_series(j: usize, max_n: usize, ring: RingTag) -> Result<Vec<Series>> {
    check_modulus(j)?;
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be ≥ 1".into()));
    }
    Ok(match ring {
        RingTag::Gf2 => rank_nt_dp::<Gf2>(j, max_n).1.into_iter().map(Series::Gf2).collect(),
        _ => {
            let nt = rank_nt_dp::<BigInt>(j, max_n).1;
            nt.iter()
                .map(|f| {
                    let f = f.to_rational();
                    if ring == RingTag::Cyclo {
                        Series::Cyclo(f.map(|c| Cyclo::from_base(c.clone())))
                    } else {
                        Series::Rational(f)
                    }
                })
                .collect()
        }
    })
}

/// `5·Σ_n M_ω(b,5,n) qⁿ` for `b = 0..4` over any ring, from the
/// roots-of-unity filter `5·M_ω(b) = W_0 + Σ_{j=1..4} ζ^{−bj} W_j`.
///
/// `W_3` and `W_4` are the complex conjugates of `W_2` and `W_1`. Every filtered
/// coefficient must land in the base ring.
pub fn five_momega<C: Coeff>(order: usize) -> Result<[Fps<C>; 5]> {
    let w0 = t_series_times_five::<C>(order);
    // plain threads: callers may hold a lazy-init lock that rayon work stealing could re-enter
    let (w1, w2) = std::thread::scope(|scope| {
        let w2 = scope.spawn(|| weighted_crank_component_in::<C>(2, order));
        let w1 = weighted_crank_component_in::<C>(1, order);
        (w1, w2.join().expect("worker panicked"))
    });
    let conj = |w: &Fps<Cyclo<C>>| w.map(|c| c.conjugate(-1));
    let ws = [w1.clone(), w2.clone(), conj(&w2), conj(&w1)];
    let mut out: Vec<Fps<C>> = Vec::with_capacity(5);
    for b in 0..5i64 {
        let mut coeffs = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = Cyclo::from_base(w0.coeff(n).clone());
            for (jm1, w) in ws.iter().enumerate() {
                let j = jm1 as i64 + 1;
                acc.add_assign_ref(&w.coeff(n).mul_zeta_pow(-b * j));
            }
            if !acc.is_base() {
                return Err(Error::NonRationalValue(acc.to_string()));
            }
            let [c0, ..] = acc.coeffs;
            coeffs.push(c0);
        }
        out.push(Fps::from_coeffs(coeffs));
    }
    Ok(out.try_into().unwrap_or_else(|_| unreachable!("five residues")))
}

/// `Σ_n M_ω(b,5,n) qⁿ` for `b = 0..4` as integer series.
pub fn momega_int(max_n: usize) -> Result<Vec<Fps<BigInt>>> {
    let five = BigInt::from(5);
    five_momega::<BigInt>(max_n)?
        .into_iter()
        .map(|f| {
            let coeffs = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(index, c)| {
                    let (q, r) = c.div_rem(&five);
                    if !r.is_zero() {
                        Err(Error::NonIntegralCoefficient {
                            index,
                            value: format!("{c}/5"),
                        })
                    } else if q.is_negative() {
                        Err(Error::NegativeCoefficient {
                            index,
                            value: q.to_string(),
                        })
                    } else {
                        Ok(q)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Fps::from_coeffs(coeffs))
        })
        .collect()
}

/// Rational form of [`momega_int`].
pub fn momega_gf_series(max_n: usize) -> Result<Vec<Fps<Rational>>> {
    Ok(momega_int(max_n)?.iter().map(Fps::to_rational).collect())
}

/// Parities of `M_ω(b,5,n)`; 5 is 1 in GF(2) so no division is needed.
pub fn momega_gf2(max_n: usize) -> Result<Vec<Fps<Gf2>>> {
    Ok(five_momega::<Gf2>(max_n)?.into())
}
