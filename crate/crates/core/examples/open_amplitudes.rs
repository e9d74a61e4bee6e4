//! Evaluates the weighted nodal-graph sums for the three classic worked
//! signatures and prints the per-stratum decomposition.
//!
//! Run with `cargo run --release --example open_amplitudes`.

use openribbon::amplitude::total_amplitude;
use openribbon::enumerate::EnumLimits;
use openribbon::nodal::OddCatalogSource;

fn main() {
    let limits = EnumLimits::default();
    let mut source = OddCatalogSource::new(limits);
    for (g, k, l) in [(0, 1, 2), (1, 0, 1), (0, 5, 1), (0, 3, 1)] {
        let b = total_amplitude(g, k, l, &mut source, &limits).unwrap();
        println!("(g,k,l) = ({g},{k},{l})");
        for s in &b.strata {
            if s.classes == 0 {
                continue;
            }
            println!(
                "  m = {}: {:4} graphs contribute {}",
                s.m,
                s.classes,
                s.amplitude.canonical_string()
            );
        }
        println!("  total: {}", b.total.canonical_string());
        println!();
    }
}
