//! Extracts open descendents from the amplitudes for every signature
//! within a dimension budget and prints the table, plus a CSV export.
//!
//! Run with `cargo run --release --example descendent_tables`.

use openribbon::amplitude::{extract_descendents, total_amplitude, DescendentTable};
use openribbon::enumerate::EnumLimits;
use openribbon::nodal::OddCatalogSource;
use openribbon::verify::signatures_within;

fn main() {
    let limits = EnumLimits::default();
    let mut source = OddCatalogSource::new(limits);
    let mut table = DescendentTable::default();
    for (g, k, l) in signatures_within(4) {
        let b = total_amplitude(g, k, l, &mut source, &limits).unwrap();
        let part = extract_descendents(&b, 0).unwrap();
        for ((gg, kk, a), v) in part.entries {
            table.insert(gg, kk, a, v);
        }
    }
    for row in table.rows() {
        let taus: Vec<String> = row.exponents.iter().map(|a| format!("τ{a}")).collect();
        println!("<{}σ^{}>_{} = {}", taus.join(""), row.k, row.g, row.value);
    }
    println!();
    println!("CSV form:");
    print!("{}", table.to_csv());
}
