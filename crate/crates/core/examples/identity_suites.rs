//! Runs every verification suite at a small dimension budget: string and
//! dilaton recursions on the open table, the coupled open KdV equation
//! with its closed inputs, the Catalan convolution identities, and the
//! angular-form identity in the formal sphere-bundle algebra.
//!
//! Run with `cargo run --release --example identity_suites`.

use openribbon::closed::extract_closed_cached;
use openribbon::enumerate::EnumLimits;
use openribbon::nodal::OddCatalogSource;
use openribbon::verify::*;

fn show(r: &Report) {
    println!(
        "{}: {}/{} pass",
        r.suite,
        r.passed_count(),
        r.instances.len()
    );
    for i in r.instances.iter().filter(|i| !i.pass) {
        println!("  FAIL {}: {} vs {}", i.instance, i.lhs, i.rhs);
    }
}

fn main() {
    show(&catalan_identities(10));
    for n in 1..=3 {
        show(&angular_identity(n));
    }

    let limits = EnumLimits::default();
    let mut source = OddCatalogSource::new(limits);
    let master = open_master(4, &mut source, &limits, 0).unwrap();
    show(&string_dilaton_check(&master));

    let mut closed = openribbon::closed::ClosedTable::default();
    for g in 0..=1usize {
        for n in 1..=3usize {
            if 2 * g + n <= 2 || 3 * (g as i64) - 3 + (n as i64) < 0 {
                continue;
            }
            let part = extract_closed_cached(g, n, &limits, None).unwrap();
            for ((g2, a), v) in part.entries {
                closed.insert(g2, a, v);
            }
        }
    }
    for n in [1usize, 2] {
        show(&open_kdv_check(n, &master, &closed, KdvOptions::default(), false));
        let negative = open_kdv_check(n, &master, &closed, KdvOptions::default(), true);
        println!(
            "open-kdv n={n} with zeroed closed inputs: pass={} (the imbalance is intended)",
            negative.pass()
        );
    }
}
