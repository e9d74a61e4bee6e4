//! Closed-surface cross-check: evaluates the trivalent graph sum for
//! closed descendents and verifies the string equation across the rows.
//!
//! Run with `cargo run --release --example closed_crosscheck`.

use openribbon::closed::{build_closed_table, string_equation_check};
use openribbon::enumerate::{enumerate_closed_trivalent, EnumLimits};

fn main() {
    let limits = EnumLimits::default();
    for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2), (1, 3)] {
        let cat = enumerate_closed_trivalent(g, n, &limits).unwrap();
        println!("closed ({g},{n}): {} trivalent classes", cat.len());
    }
    println!();
    let table = build_closed_table(1, 3, &limits).unwrap();
    for ((g, a), v) in &table.entries {
        let taus: Vec<String> = a.iter().map(|x| format!("τ{x}")).collect();
        println!("<{}>^c_{} = {}", taus.join(""), g, v);
    }
    let (checked, failures) = string_equation_check(&table);
    println!();
    println!("string equation: {checked} instances checked, {} failures", failures.len());
    for f in failures {
        println!("  {f}");
    }
}
