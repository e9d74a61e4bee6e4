//! Solves the orientation constraint system on every odd graph of a few
//! signatures and tallies flip classes against the predicted spin counts.
//!
//! Run with `cargo run --example kasteleyn_census`.

use openribbon::enumerate::{enumerate_open_trivalent, odd_subset, EnumLimits};
use openribbon::kasteleyn::{flip_quotient, report, solve_kasteleyn};

fn main() {
    let limits = EnumLimits::default();
    for (g, k, l) in [(0, 1, 1), (0, 3, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1)] {
        let cat = enumerate_open_trivalent(g, k, l, &limits).unwrap();
        println!("signature ({g},{k},{l}): {} graphs", cat.len());
        for (i, e) in cat.entries.iter().enumerate() {
            let r = report(&e.graph).unwrap();
            let odd = e.graph.is_odd();
            println!(
                "  graph {i}: {} solutions, {} classes, c_spin = {} (expected {}), odd = {odd}, {}",
                r.solutions,
                r.classes,
                r.c_spin,
                r.expected_c_spin,
                if r.matches { "match" } else { "MISMATCH" }
            );
        }
        // the odd subset carries all the weight in the amplitude sums
        let odd = odd_subset(&cat);
        for e in &odd.entries {
            let sols = solve_kasteleyn(&e.graph).unwrap();
            let orbits = flip_quotient(&e.graph, &sols).unwrap();
            let vi = e.graph.stats().unwrap().internal_vertices;
            assert!(orbits.iter().all(|o| o.len() == 1 << vi));
        }
        println!("  flip orbits all have size 2^|V^I| on the odd subset");
    }
}
