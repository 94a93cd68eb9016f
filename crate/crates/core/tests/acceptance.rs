//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exact identities must hold; the density experiment is exploratory, so its
//! target-proximity verdict is printed but only its proved lower bounds gate
//! the exit status.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};

use qbeck::fps::Fps;
use qbeck::identities::{density, IdentityReport, Registry, Statistic};
use qbeck::qseries::{garvan_all, momega_closed_form};
use qbeck::partitions::{momega_gf_series, nt_dp_series, rank_nt_dp, stat_table, stat_table_with_cap};
use qbeck::ring::{cyclo_power_of_zeta, Coeff, Cyclo, CycloElem, Rational, RingTag};

const DENSITY_UPTO: usize = 1000;
const DENSITY_TOL: f64 = 0.08;

struct Outcome {
    pass: bool,
    /// Printed but not counted toward the exit status.
    exploratory: bool,
    detail: String,
}

impl Outcome {
    fn exact(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            exploratory: false,
            detail: detail.into(),
        }
    }
}

fn run(reg: &Registry, ids: &[&str], order: usize) -> (bool, String) {
    let reports: Vec<IdentityReport> = reg.run_many(ids, order).expect("known ids");
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| match (&r.error, r.first_mismatch) {
            (Some(e), _) => format!("{} ({e})", r.id),
            (None, Some(n)) => format!("{} (first mismatch at q^{n})", r.id),
            (None, None) => r.id.clone(),
        })
        .collect();
    let detail = if failed.is_empty() {
        format!("{} checks at order {order}", reports.len())
    } else {
        format!("failing: {}", failed.join(", "))
    };
    (failed.is_empty(), detail)
}

fn lambert(reg: &Registry) -> Outcome {
    let letters: Vec<String> = "abcdefghi".chars().map(|c| format!("L2.2.{c}")).collect();
    let ids: Vec<&str> = letters.iter().map(String::as_str).collect();
    let (ok, detail) = run(reg, &ids, 300);
    let master = reg.run_check("L2.2.master", 200).expect("known id");
    let instances = master.parts.len();
    let pass = ok && master.passed && instances == 20;
    Outcome::exact(
        pass,
        format!("{detail}; {instances} random master instances at order 200 passed={}", master.passed),
    )
}

fn crank_components(reg: &Registry) -> Outcome {
    let ids = ["T3.1.b0", "T3.1.b1", "T3.1.b2", "T3.1.b3", "T3.1.b4"];
    let (ok, detail) = run(reg, &ids, 45);
    // closed forms against enumeration, outside the registry
    let table = stat_table(45, 5).expect("within budget");
    let enumerated = table.momega.as_ref().expect("j = 5 carries M_ω");
    let abcd = garvan_all::<Rational>(45);
    let direct = (0..5).all(|b| {
        let closed = momega_closed_form(b, &abcd, 45);
        (0..=45).all(|n| closed.coeff(n) == &Rational::from_integer(enumerated[b][n].clone()))
    });
    let cross = format!("closed forms = enumeration for n ≤ 45: {direct}");
    Outcome::exact(ok && direct, format!("{detail}; {cross}"))
}

fn three_way() -> Outcome {
    let mut bad = Vec::new();
    for j in [5usize, 7] {
        let table = stat_table(40, j).expect("within budget");
        let dp = nt_dp_series(j, 40, RingTag::Rational).expect("dp");
        for (m, series) in dp.iter().enumerate() {
            let expected: Vec<String> = table.nt[m].iter().map(ToString::to_string).collect();
            if series.coeff_strings() != expected {
                bad.push(format!("NT j={j} m={m}"));
            }
        }
        if j == 5 {
            let gf = momega_gf_series(40).expect("gf");
            let enumerated = table.momega.as_ref().expect("j = 5 carries M_ω");
            for b in 0..5 {
                let expected: Vec<Rational> = enumerated[b].iter().map(|v| Rational::from_integer(v.clone())).collect();
                if gf[b].coeffs() != &expected[..] {
                    bad.push(format!("Momega b={b}"));
                }
            }
        }
    }
    Outcome::exact(
        bad.is_empty(),
        if bad.is_empty() {
            "enumeration = DP = GF for n ≤ 40, j ∈ {5, 7}".into()
        } else {
            format!("disagreement: {}", bad.join(", "))
        },
    )
}

fn weighted_difference(reg: &Registry) -> Outcome {
    let a = reg.run_check("T1.a", 200).expect("known id");
    let leading_ok = a.lhs_sample.iter().take(5).map(String::as_str).eq(["-5", "-5", "-10", "-15", "-25"]);
    let (b_ok, b_detail) = run(reg, &["T1.b"], 45);
    let t = stat_table(4, 5).expect("tiny table");
    let mo = t.momega.as_ref().expect("j = 5");
    let lhs = &mo[2][4] - &mo[3][4];
    let rhs = BigInt::from(2) * (&t.nt[1][4] - &t.nt[4][4]);
    let hand = lhs == BigInt::from(-2) && rhs == BigInt::from(-2);
    Outcome::exact(
        a.passed && leading_ok && b_ok && hand,
        format!(
            "T1.a passed={} leading={:?}; {b_detail}; n=4 hand check {lhs} = {rhs}",
            a.passed,
            &a.lhs_sample[..5.min(a.lhs_sample.len())]
        ),
    )
}

fn intro(reg: &Registry) -> Outcome {
    let (dyson_ok, dyson) = run(reg, &["INTRO.dyson.5", "INTRO.dyson.7"], 8);
    // rank equidistribution straight from enumeration: 5n+4 and 7n+5 for n ≤ 8
    let t5 = stat_table(44, 5).expect("within budget");
    let t7 = stat_table_with_cap(61, 7, 61).expect("explicit budget");
    let equi = |t: &qbeck::partitions::StatTable, k: usize| (1..t.j).all(|m| t.rank[m][k] == t.rank[0][k]);
    let direct = (0..=8).all(|n| equi(&t5, 5 * n + 4) && equi(&t7, 7 * n + 5));
    let (cong_ok, cong) = run(reg, &["INTRO.beck", "INTRO.chern"], 45);
    let (mao_ok, mao) = run(reg, &["INTRO.mao7.a", "INTRO.mao7.b"], 150);
    Outcome::exact(
        dyson_ok && direct && cong_ok && mao_ok,
        format!("Dyson: {dyson}, direct enumeration {direct}; {cong}; mao7: {mao}"),
    )
}

fn density_experiment() -> Vec<(String, Outcome)> {
    let pairs = [
        (Statistic::Momega, 1, 4),
        (Statistic::Momega, 2, 3),
        (Statistic::Nt, 0, 1),
        (Statistic::Nt, 1, 3),
        (Statistic::Nt, 2, 4),
    ];
    let start = Instant::now();
    let mut forced_ok = true;
    let mut generic_ok = true;
    let mut lines = Vec::new();
    for (stat, i, j) in pairs {
        let rows = density(stat, i, j, 2, DENSITY_UPTO, 100, DENSITY_UPTO).expect("density");
        forced_ok &= rows.iter().all(|r| r.forced_ok);
        let last = rows.last().expect("at least one row");
        let near = (last.density_f64() - last.target_f64()).abs() <= DENSITY_TOL;
        if stat == Statistic::Nt {
            generic_ok &= near;
        }
        lines.push(format!(
            "{stat}({i},{j}): {}/{} = {:.3}, target {} ({})",
            last.matches,
            last.upto,
            last.density_f64(),
            last.target,
            if near { "within ±0.08" } else { "outside ±0.08" }
        ));
        if stat == Statistic::Momega {
            let lower = forced_lower_bound(i, j);
            lines.push(format!(
                "  forced matches give density ≥ {lower:.2}; target {} {}",
                last.target,
                if last.target_f64() < lower { "is below this bound" } else { "is consistent" }
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let momega_near = lines.iter().filter(|l| l.starts_with("momega")).all(|l| l.contains("within"));
    vec![
        (
            "10a density: proved lower bounds and generic NT pairs".into(),
            Outcome::exact(
                forced_ok && generic_ok,
                format!("forced residues all match={forced_ok}; NT pairs near 1/2={generic_ok}; {secs:.1}s"),
            ),
        ),
        (
            "10b density: M_ω targets".into(),
            Outcome {
                pass: momega_near,
                exploratory: true,
                detail: lines.join("\n      "),
            },
        ),
    ]
}

/// Share of residues mod 5 at which a congruence forces a parity match.
fn forced_lower_bound(i: usize, j: usize) -> f64 {
    match (i, j) {
        (1, 4) => 2.0 / 5.0,
        (2, 3) => 1.0 / 5.0,
        _ => 0.0,
    }
}

fn properties() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 64,
        rng_seed: RngSeed::Fixed(7),
        failure_persistence: None,
        ..Config::default()
    });
    let rat = (-30i64..=30, 1i64..=9).prop_map(|(n, d)| Rational::new(n.into(), d.into()));
    let cyc = [rat.clone(), rat.clone(), rat.clone(), rat.clone()].prop_map(Cyclo::new);
    let mut failures = Vec::new();

    let r = runner.run(&(cyc.clone(), cyc.clone(), cyc), |(a, b, c)| {
        prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
        Ok(())
    });
    if r.is_err() {
        failures.push("ring axioms");
    }

    let series = (1i64..=5, prop::collection::vec(rat.clone(), 12)).prop_map(|(c0, rest)| {
        let mut v = vec![Rational::from_i64(c0)];
        v.extend(rest);
        Fps::from_coeffs(v)
    });
    let r = runner.run(&series, |f| {
        prop_assert_eq!(f.mul(&f.invert().unwrap()), Fps::one(f.order()));
        Ok(())
    });
    if r.is_err() {
        failures.push("series inversion");
    }

    let r = runner.run(&prop::collection::vec(rat, 1..30), |v| {
        let f = Fps::from_coeffs(v);
        let back = f.substitute_q5().dissect(0);
        prop_assert_eq!(back.clone(), f.truncate(back.order()));
        Ok(())
    });
    if r.is_err() {
        failures.push("dissection round-trip");
    }

    let r = runner.run(&(0i64..5, 0i64..5), |(a, b)| {
        let mut acc = CycloElem::zero();
        for k in 0..5 {
            acc.add_assign_ref(&cyclo_power_of_zeta((a - b) * k));
        }
        prop_assert_eq!(acc, CycloElem::from_i64(if a == b { 5 } else { 0 }));
        Ok(())
    });
    if r.is_err() {
        failures.push("filter orthogonality");
    }

    let r = runner.run(&(prop::sample::select(vec![3usize, 5, 7]), 1usize..80), |(j, n)| {
        let (rank, _) = rank_nt_dp::<BigInt>(j, n);
        for m in 0..j {
            prop_assert_eq!(rank[m].coeff(n), rank[(j - m) % j].coeff(n));
        }
        Ok(())
    });
    if r.is_err() {
        failures.push("rank symmetry");
    }

    Outcome::exact(
        failures.is_empty(),
        if failures.is_empty() {
            "five families × 64 cases, fixed seed (full suite in tests/properties.rs)".into()
        } else {
            format!("failing: {}", failures.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let reg = Registry::default();
    let mut results: Vec<(String, Outcome)> = Vec::new();
    let timed = |results: &mut Vec<(String, Outcome)>, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let mut o = f();
        o.detail = format!("{} [{:.1}s]", o.detail, t.elapsed().as_secs_f64());
        results.push((name.to_string(), o));
    };

    timed(&mut results, "1 Lambert sums", &mut || lambert(&reg));
    timed(&mut results, "2 rational product identities", &mut || {
        let (ok, d) = run(&reg, &["L2.3.a", "L2.3.b"], 300);
        Outcome::exact(ok, d)
    });
    timed(&mut results, "3 cyclotomic products", &mut || {
        let (ok, d) = run(&reg, &["L2.1.m1", "L2.1.m2"], 200);
        Outcome::exact(ok, d)
    });
    timed(&mut results, "4 crank components vs enumeration", &mut || crank_components(&reg));
    timed(&mut results, "5 oracle agreement", &mut three_way);
    timed(&mut results, "6 weighted 5n+4 difference", &mut || weighted_difference(&reg));
    timed(&mut results, "7 M_ω and NT difference identities", &mut || {
        let (ok, d) = run(&reg, &["T2", "T3", "T4", "E4.7", "E4.9", "E4.10", "E4.12", "E4.13"], 200);
        Outcome::exact(ok, d)
    });
    timed(&mut results, "8 classical results", &mut || intro(&reg));
    timed(&mut results, "9 parity congruences", &mut || {
        let (ok, d) = run(&reg, &["C5.1", "C5.2", "C5.3"], 45);
        Outcome::exact(ok, d)
    });
    results.extend(density_experiment());
    timed(&mut results, "11 property suites", &mut properties);

    let mut failed = 0;
    println!("acceptance");
    for (name, o) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if o.exploratory { " (exploratory, not gating)" } else { "" };
        println!("{verdict} {name}{note}: {}", o.detail);
        if !o.pass && !o.exploratory {
            failed += 1;
        }
    }
    println!("{} gating criteria failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
