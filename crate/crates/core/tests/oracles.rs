//! Worked examples checked against independent computations.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use qbeck::error::Error;
use qbeck::fps::{Fps, Series};
use qbeck::identities::{corrupted_garvan, run_all, run_check, Registry, Settings};
use qbeck::partitions::{enumerate, momega_int, nt_dp_series, stat_table};
use qbeck::qseries::{bilateral_lambert, lambert_master, lambert_master_lhs, named_series, Garvan};
use qbeck::ring::{cyclo_mul, cyclo_power_of_zeta, cyclo_to_rational, Coeff, CycloElem, Rational, RingTag};

fn z(k: i64) -> CycloElem {
    cyclo_power_of_zeta(k)
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Partition counts by the pentagonal recurrence.
fn partition_numbers(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::from(0); n + 1];
    p[0] = BigInt::from(1);
    for m in 1..=n {
        let mut acc = BigInt::from(0);
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += &p[m - g1] * sign;
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                acc += &p[m - g2] * sign;
            }
        }
        p[m] = acc;
    }
    p
}

#[test]
fn cyclotomic_arithmetic() {
    assert_eq!(cyclo_mul(&z(1), &z(4)), CycloElem::one());
    assert_eq!(cyclo_mul(&z(1).add_ref(&z(4)), &z(2).add_ref(&z(3))), CycloElem::from_i64(-1));
    let one_plus = CycloElem::one().add_ref(&z(1));
    let expected = CycloElem::one()
        .add_ref(&z(1).mul_ref(&CycloElem::from_i64(2)))
        .add_ref(&z(2));
    assert_eq!(cyclo_mul(&one_plus, &one_plus), expected);
    assert_eq!(z(0), CycloElem::one());
    assert_eq!(z(4).to_string(), "(-1, -1, -1, -1)");
    assert_eq!(z(-3), z(2));
    assert_eq!(cyclo_to_rational(&CycloElem::from_i64(7)).unwrap(), Rational::from_i64(7));
    assert!(matches!(cyclo_to_rational(&one_plus), Err(Error::NonRationalValue(_))));
    let mut all = CycloElem::zero();
    for k in 0..5 {
        all.add_assign_ref(&z(k));
    }
    assert!(all.is_zero());
}

#[test]
fn inversion_of_euler_product_gives_partition_numbers() {
    let p = partition_numbers(300);
    let euler = qbeck::qseries::euler::<Rational>(300);
    let inv = euler.invert().unwrap().to_integers().unwrap();
    assert_eq!(inv.coeffs(), &p[..]);
    for n in 0..=20u32 {
        assert_eq!(enumerate(n).count(), p[n as usize].to_usize().unwrap());
    }
}

#[test]
fn garvan_series_small_orders() {
    assert_eq!(named_series::<BigInt>(Garvan::D, 0), Fps::one(0));
    let c = named_series::<BigInt>(Garvan::C, 2);
    assert_eq!(c.coeff(1), &BigInt::from(0));
    assert_eq!(c.coeff(2), &BigInt::from(1));
}

#[test]
fn lambert_examples() {
    assert!(lambert_master_lhs::<BigInt>(2, 3, 1, 300).unwrap().is_zero());
    assert!(lambert_master_lhs::<BigInt>(1, 4, 0, 300).unwrap().is_zero());
    let (l, r) = lambert_master::<BigInt>(1, 1, 0, 200).unwrap();
    assert_eq!(l, r);
    assert_eq!(bilateral_lambert::<BigInt>(1, 1, 5).unwrap().coeff(0), &BigInt::from(1));
    assert_eq!(
        bilateral_lambert::<BigInt>(1, 2, 200).unwrap(),
        lambert_master_lhs::<BigInt>(1, 2, 0, 200).unwrap()
    );
}

#[test]
fn series_json_and_ring_tags() {
    let s = qbeck::expr::expand("1/5 + 1/5*q", 1, RingTag::Rational).unwrap();
    assert_eq!(s, Series::Rational(Fps::from_coeffs(vec![rat(1, 5), rat(1, 5)])));
    assert_eq!(Series::from_json(&s.to_json()).unwrap(), s);
}

#[test]
fn three_way_oracle_agreement() {
    for j in [5, 7] {
        let table = stat_table(40, j).unwrap();
        let dp = nt_dp_series(j, 40, RingTag::Rational).unwrap();
        for (m, series) in dp.iter().enumerate() {
            let expected: Vec<String> = table.nt[m].iter().map(ToString::to_string).collect();
            assert_eq!(series.coeff_strings(), expected, "j={j} m={m}");
        }
    }
    let table = stat_table(40, 5).unwrap();
    let gf = momega_int(40).unwrap();
    for (series, column) in gf.iter().zip(table.momega.as_ref().unwrap()) {
        assert_eq!(series.coeffs(), &column[..]);
    }
}

#[test]
fn registry_all_pass_at_100() {
    let reports = run_all(100);
    assert_eq!(reports.len(), Registry::ids().len());
    for r in &reports {
        assert!(r.passed, "{r:?}");
        assert!(!r.lhs_sample.is_empty());
    }
}

#[test]
fn fault_injection_reports_first_mismatch() {
    let reg = Registry::new(Settings {
        garvan: corrupted_garvan,
        ..Settings::default()
    });
    let reports = reg.run_all(40);
    let t31: Vec<_> = reports.iter().filter(|r| r.id.starts_with("T3.1")).collect();
    assert_eq!(t31.len(), 5);
    for r in t31 {
        assert!(!r.passed, "{} should fail", r.id);
        let n = r.first_mismatch.expect("mismatch index");
        assert!((15..=18).contains(&n), "{}: {n}", r.id);
    }
    // checks that never touch A..D are unaffected
    assert!(reports.iter().find(|r| r.id == "E4.4").unwrap().passed);
}

#[test]
fn reports_name_the_failing_part() {
    let r = run_check("E4.12", 30).unwrap();
    assert!(r.passed);
    assert_eq!(r.parts.len(), 2);
    assert!(r.parts.iter().all(|p| p.first_mismatch.is_none() && p.order == 30));
}
