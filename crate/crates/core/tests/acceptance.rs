//! Acceptance suite: one test per criterion, each printing a pass line.
//! Everything is exact rational arithmetic; no tolerances anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use openribbon::amplitude::{extract_descendents, graph_amplitude, total_amplitude};
use openribbon::closed::{build_closed_table, string_equation_check, ClosedTable};
use openribbon::enumerate::{enumerate_open_trivalent, EnumLimits};
use openribbon::kasteleyn;
use openribbon::nodal::OddCatalogSource;
use openribbon::ratfun::{Factor, RationalFunction};
use openribbon::verify::{
    angular_identity, catalan_identities, open_kdv_check, open_master, signatures_within,
    string_dilaton_check, KdvOptions, OpenMaster,
};
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

/// Criteria with runtime budgets must not contend with the others for
/// CPU, so every test serializes on one lock.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qq(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn limits() -> EnumLimits {
    EnumLimits::default()
}

fn master() -> &'static OpenMaster {
    static MASTER: OnceLock<OpenMaster> = OnceLock::new();
    MASTER.get_or_init(|| {
        let lim = limits();
        let mut source = OddCatalogSource::new(lim);
        open_master(6, &mut source, &lim, 0).expect("master table within budget")
    })
}

fn closed_base() -> &'static ClosedTable {
    static CLOSED: OnceLock<ClosedTable> = OnceLock::new();
    CLOSED.get_or_init(|| build_closed_table(1, 4, &limits()).expect("closed base"))
}

fn inv_var(nvars: usize, i: usize, power: u32, num: i64) -> RationalFunction {
    RationalFunction::inverse_factor(nvars, Factor::Var(i), power, q(num))
}

fn inv_sum(nvars: usize, i: usize, j: usize) -> RationalFunction {
    RationalFunction::inverse_factor(nvars, Factor::Sum(i, j), 1, q(1))
}

#[test]
fn criterion_01_worked_example_a() {
    let _guard = serial();
    let start = Instant::now();
    let lim = limits();
    let mut source = OddCatalogSource::new(lim);
    let b = total_amplitude(0, 1, 2, &mut source, &lim).unwrap();
    // total: 2/(λ1 λ2^3) + 2/(λ2 λ1^3)
    let expect = inv_var(2, 0, 1, 1)
        .mul(&inv_var(2, 1, 3, 2))
        .add(&inv_var(2, 1, 1, 1).mul(&inv_var(2, 0, 3, 2)));
    assert!(b.total.eq_exact(&expect), "total amplitude mismatch");
    // non-nodal stratum: the four listed smooth contributions
    let smooth = inv_var(2, 0, 1, 1)
        .mul(&inv_sum(2, 0, 1))
        .mul(&inv_var(2, 1, 2, 1))
        .add(&inv_var(2, 1, 1, 1).mul(&inv_sum(2, 0, 1)).mul(&inv_var(2, 0, 2, 1)))
        .add(&inv_var(2, 0, 3, 1).mul(&inv_sum(2, 0, 1)))
        .add(&inv_var(2, 1, 3, 1).mul(&inv_sum(2, 0, 1)));
    assert_eq!(b.strata[0].classes, 4);
    assert!(b.strata[0].amplitude.eq_exact(&smooth), "smooth stratum mismatch");
    // nodal strata: 1/(λ1 λ2^3) + 1/(λ2 λ1^3)
    let nodal_total = b.strata[1..]
        .iter()
        .fold(RationalFunction::zero(2), |acc, s| acc.add(&s.amplitude));
    let nodal_expect = inv_var(2, 0, 1, 1)
        .mul(&inv_var(2, 1, 3, 1))
        .add(&inv_var(2, 1, 1, 1).mul(&inv_var(2, 0, 3, 1)));
    assert!(nodal_total.eq_exact(&nodal_expect), "nodal strata mismatch");
    let table = extract_descendents(&b, 0).unwrap();
    assert_eq!(table.get(0, 1, &[1, 0]), Some(&q(1)));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("criterion 1: PASS (worked example a, {elapsed:?})");
}

#[test]
fn criterion_02_worked_example_b() {
    let _guard = serial();
    let start = Instant::now();
    let lim = limits();
    let mut source = OddCatalogSource::new(lim);
    let b = total_amplitude(1, 0, 1, &mut source, &lim).unwrap();
    let expect = inv_var(1, 0, 3, 1);
    assert!(b.total.eq_exact(&expect));
    assert_eq!(b.strata[0].classes, 0, "odd filter must kill the smooth graph");
    assert!(b.strata[0].amplitude.is_zero());
    let table = extract_descendents(&b, 0).unwrap();
    assert_eq!(table.get(1, 0, &[1]), Some(&qq(1, 2)));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("criterion 2: PASS (worked example b, {elapsed:?})");
}

#[test]
fn criterion_03_worked_example_c() {
    let _guard = serial();
    let start = Instant::now();
    let lim = limits();
    let mut source = OddCatalogSource::new(lim);
    let b = total_amplitude(0, 5, 1, &mut source, &lim).unwrap();
    assert!(b.total.eq_exact(&inv_var(1, 0, 5, 384)));
    assert_eq!(b.strata[0].classes, 24);
    assert_eq!(b.strata[1].classes, 120);
    assert_eq!(b.strata[2].classes, 120);
    assert!(b.strata[1].amplitude.eq_exact(&inv_var(1, 0, 5, 120)));
    assert!(b.strata[2].amplitude.eq_exact(&inv_var(1, 0, 5, 240)));
    // per-class contributions: 1/λ^5 at one node, 2/λ^5 at two nodes
    let one_node = openribbon::nodal::enumerate_nodal(0, 5, 1, 1, &mut source, &lim).unwrap();
    for e in &one_node.entries {
        assert!(graph_amplitude(&e.graph, 1, e.aut).eq_exact(&inv_var(1, 0, 5, 1)));
    }
    let two_node = openribbon::nodal::enumerate_nodal(0, 5, 1, 2, &mut source, &lim).unwrap();
    for e in &two_node.entries {
        assert!(graph_amplitude(&e.graph, 1, e.aut).eq_exact(&inv_var(1, 0, 5, 2)));
    }
    let table = extract_descendents(&b, 0).unwrap();
    assert_eq!(table.get(0, 5, &[2]), Some(&q(8)));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    println!("criterion 3: PASS (worked example c, {elapsed:?})");
}

#[test]
fn criterion_04_initial_condition() {
    let _guard = serial();
    let lim = limits();
    let mut source = OddCatalogSource::new(lim);
    let b1 = total_amplitude(0, 3, 0, &mut source, &lim).unwrap();
    let t1 = extract_descendents(&b1, 0).unwrap();
    assert_eq!(t1.get(0, 3, &[]), Some(&q(1)), "sigma^3 bracket");
    let b2 = total_amplitude(0, 1, 1, &mut source, &lim).unwrap();
    let t2 = extract_descendents(&b2, 0).unwrap();
    assert_eq!(t2.get(0, 1, &[0]), Some(&q(1)), "tau_0 sigma bracket");
    println!("criterion 4: PASS (initial condition)");
}

#[test]
fn criterion_05_kasteleyn_counting() {
    let _guard = serial();
    let start = Instant::now();
    let lim = limits();
    let mut odd_graphs = 0usize;
    let mut even_graphs = 0usize;
    for (g, k, l) in signatures_within(6) {
        let cat = enumerate_open_trivalent(g, k, l, &lim).unwrap();
        for e in &cat.entries {
            let stats = e.graph.stats().unwrap();
            if e.graph.is_odd() {
                odd_graphs += 1;
                let sols = kasteleyn::solve_kasteleyn(&e.graph).unwrap();
                assert!(!sols.is_empty());
                let orbits = kasteleyn::flip_quotient(&e.graph, &sols).unwrap();
                let expected_orbit = 1usize << stats.internal_vertices;
                assert!(orbits.iter().all(|o| o.len() == expected_orbit));
                let c = kasteleyn::c_spin(&e.graph).unwrap();
                let exponent = (stats.genus + stats.boundaries - 1) / 2;
                assert_eq!(c, 1u64 << exponent, "c_spin at ({g},{k},{l})");
            } else {
                even_graphs += 1;
                assert_eq!(kasteleyn::c_spin(&e.graph).unwrap(), 0);
            }
        }
    }
    assert!(odd_graphs > 5000 && even_graphs > 100, "census covered the catalogs");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}, budget 2 min");
    println!(
        "criterion 5: PASS (kasteleyn counting on {odd_graphs} odd + {even_graphs} even graphs, {elapsed:?})"
    );
}

#[test]
fn criterion_06_closed_cross_check() {
    let _guard = serial();
    let table = closed_base();
    assert_eq!(table.get(0, &[0, 0, 0]), Some(&q(1)));
    assert_eq!(table.get(1, &[1]), Some(&qq(1, 24)));
    let (checked, failures) = string_equation_check(table);
    assert!(checked >= 8, "expected a real spread of instances, got {checked}");
    assert!(failures.is_empty(), "failures: {failures:?}");
    println!("criterion 6: PASS (closed cross-check, string equation on {checked} rows)");
}

#[test]
fn criterion_07_identity_suites() {
    let _guard = serial();
    let m = master();
    let sd = string_dilaton_check(m);
    assert!(sd.pass(), "string/dilaton failures: {:?}",
        sd.instances.iter().filter(|i| !i.pass).collect::<Vec<_>>());
    assert!(sd.instances.len() >= 25, "coverage: {}", sd.instances.len());
    let cat = catalan_identities(10);
    assert!(cat.pass());
    assert_eq!(cat.instances.len(), 20);
    for n in 1..=3 {
        let ang = angular_identity(n);
        assert!(ang.pass(), "angular rank {n}");
    }
    println!(
        "criterion 7: PASS (string/dilaton {} rows, catalan m<=10, angular n<=3)",
        sd.instances.len()
    );
}

#[test]
fn criterion_08_open_kdv() {
    let _guard = serial();
    let m = master();
    let closed = closed_base();
    for n in [1usize, 2] {
        let r = open_kdv_check(n, m, closed, KdvOptions::default(), false);
        assert!(r.pass(), "open kdv n={n}: {:?}",
            r.instances.iter().filter(|i| !i.pass).collect::<Vec<_>>());
        let negative = open_kdv_check(n, m, closed, KdvOptions::default(), true);
        assert!(!negative.pass(), "corrupted closed inputs must break n={n}");
    }
    println!("criterion 8: PASS (open KdV n=1,2 with negative control)");
}

#[test]
fn criterion_09_route_agreement() {
    let _guard = serial();
    // extract_descendents already demands exact agreement of the symbolic
    // and evaluation routes; run it across every computed signature.
    let lim = limits();
    let mut source = OddCatalogSource::new(lim);
    let mut signatures = 0usize;
    for (g, k, l) in signatures_within(6) {
        let b = total_amplitude(g, k, l, &mut source, &lim).unwrap();
        extract_descendents(&b, 0).unwrap();
        extract_descendents(&b, 7).unwrap(); // different sample points
        signatures += 1;
    }
    assert!(signatures >= 20);
    println!("criterion 9: PASS (route agreement on {signatures} signatures)");
}

#[test]
fn criterion_10_determinism_and_cache() {
    let _guard = serial();
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_openribbon");
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |args: &[&str]| {
        let out = Command::new(bin)
            .args(args)
            .env("OPENRIBBON_CACHE_DIR", &cache)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "command failed: {args:?}");
        out.stdout
    };
    let commands: Vec<Vec<&str>> = vec![
        vec!["enumerate", "0", "5", "1", "--odd"],
        vec!["amplitude", "0", "1", "2"],
        vec!["descendents", "0", "5", "1", "--format", "csv"],
        vec!["kasteleyn", "0", "3", "1"],
        vec!["verify", "--suite", "catalan"],
        vec!["enumerate", "--closed", "1", "1"],
    ];
    for args in &commands {
        let cold = run(args);
        let warm = run(args);
        assert_eq!(cold, warm, "cold/warm bytes differ for {args:?}");
    }
    // concurrent runs against the same cache directory
    let handles: Vec<_> = (0..3)
        .map(|_| {
            let bin = bin.to_string();
            let cache = cache.clone();
            std::thread::spawn(move || {
                let out = Command::new(bin)
                    .args(["amplitude", "0", "3", "1"])
                    .env("OPENRIBBON_CACHE_DIR", cache)
                    .output()
                    .unwrap();
                assert!(out.status.success());
                out.stdout
            })
        })
        .collect();
    let results: Vec<Vec<u8>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(results.windows(2).all(|w| w[0] == w[1]), "parallel runs diverge");
    println!("criterion 10: PASS (byte-identical cold/warm/parallel runs)");
}
