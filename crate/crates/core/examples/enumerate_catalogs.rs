//! Enumerates isomorphism classes of trivalent ribbon graphs: smooth open
//! catalogs, their odd subsets, and the nodal catalogs built from them.
//!
//! Run with `cargo run --example enumerate_catalogs`.

use openribbon::enumerate::{enumerate_open_trivalent, odd_subset, EnumLimits};
use openribbon::nodal::{enumerate_nodal, OddCatalogSource};

fn main() {
    let limits = EnumLimits::default();

    println!("smooth open catalogs (classes / odd classes):");
    for (g, k, l) in [(0, 1, 1), (0, 3, 1), (0, 5, 1), (0, 1, 2), (1, 0, 1), (1, 2, 1)] {
        let cat = enumerate_open_trivalent(g, k, l, &limits).expect("stable signature");
        let odd = odd_subset(&cat);
        println!("  ({g},{k},{l}): {:4} classes, {:4} odd", cat.len(), odd.len());
    }

    println!();
    println!("one catalog in detail, boundary loop disks with two faces:");
    let cat = enumerate_open_trivalent(0, 1, 2, &limits).unwrap();
    for (i, e) in cat.entries.iter().enumerate() {
        let s = e.graph.stats().unwrap();
        println!(
            "  graph {i}: {} edges, {} internal vertices, |Aut| = {}",
            s.edges, s.internal_vertices, e.aut
        );
    }

    println!();
    println!("nodal strata for (g,k,l) = (0,5,1):");
    let mut source = OddCatalogSource::new(limits);
    for m in 0..=4 {
        let nodal = enumerate_nodal(0, 5, 1, m, &mut source, &limits).unwrap();
        println!("  m = {m}: {} classes", nodal.len());
    }
}
