//! Independent-oracle checks: the fast enumerators against matching-based
//! brute force, orbit bookkeeping, the two equivalent nodal descriptions,
//! and the path-weight laws on whole catalogs.

use openribbon::enumerate::{self, enumerate_open_trivalent, odd_subset, EnumLimits};
use openribbon::kasteleyn::{q_of_cycle, q_of_path, reverse_path, solve_kasteleyn};
use openribbon::nodal::{
    enumerate_nodal, erase_unmarked_points, insert_illegal_points, oracle_nodal, OddCatalogSource,
};
use openribbon::ribbon::OpenTrivalentGraph;
use std::collections::BTreeSet;

fn limits() -> EnumLimits {
    EnumLimits::default()
}

#[test]
fn open_enumeration_matches_brute_force() {
    for (g, k, l) in [(0, 1, 1), (0, 3, 1), (0, 1, 2), (1, 0, 1), (0, 5, 1), (1, 2, 1), (0, 3, 2)] {
        let fast = enumerate_open_trivalent(g, k, l, &limits()).unwrap();
        let slow = enumerate::oracle::open_catalog(g, k, l);
        let fc: Vec<_> = fast.entries.iter().map(|e| e.graph.canonical_form().0).collect();
        let sc: Vec<_> = slow.entries.iter().map(|e| e.graph.canonical_form().0).collect();
        assert_eq!(fc, sc, "catalog mismatch at ({g},{k},{l})");
        for (a, b) in fast.entries.iter().zip(&slow.entries) {
            assert_eq!(a.aut, b.aut, "automorphism count at ({g},{k},{l})");
        }
    }
}

#[test]
fn closed_enumeration_matches_brute_force() {
    for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2)] {
        let fast = enumerate::enumerate_closed_trivalent(g, n, &limits()).unwrap();
        let slow = enumerate::oracle::closed_catalog(g, n);
        assert_eq!(fast.len(), slow.len(), "count at ({g},{n})");
        let fc: Vec<_> = fast.entries.iter().map(|e| e.graph.canonical_form().0).collect();
        let sc: Vec<_> = slow.entries.iter().map(|e| e.graph.canonical_form().0).collect();
        assert_eq!(fc, sc);
    }
}

#[test]
fn automorphism_bookkeeping() {
    for (g, k, l) in [(0, 3, 1), (0, 1, 2), (1, 0, 1), (0, 5, 1)] {
        let cat = enumerate_open_trivalent(g, k, l, &limits()).unwrap();
        for e in &cat.entries {
            let autos = e.graph.automorphisms();
            assert_eq!(autos.len() as u64, e.aut);
            let set: BTreeSet<Vec<usize>> = autos.iter().cloned().collect();
            let n = e.graph.n_half();
            assert!(set.contains(&(0..n).collect::<Vec<_>>()), "identity present");
            for a in &autos {
                for b in &autos {
                    let comp: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
                    assert!(set.contains(&comp), "closed under composition");
                }
            }
            // the labeled group embeds in the unlabeled one
            let unlabeled = e.graph.automorphisms_unlabeled().len();
            assert_eq!(unlabeled % autos.len(), 0);
        }
    }
}

#[test]
fn nodal_enumeration_matches_brute_force() {
    let lim = limits();
    let mut src = OddCatalogSource::new(lim);
    for (g, k, l, m) in [
        (0, 1, 2, 1),
        (0, 1, 2, 2),
        (1, 0, 1, 1),
        (0, 3, 1, 1),
        (0, 3, 1, 2),
        (1, 0, 2, 2),
        (0, 3, 2, 2),
    ] {
        let fast = enumerate_nodal(g, k, l, m, &mut src, &lim).unwrap();
        let slow = oracle_nodal(g, k, l, m, &mut src, &lim).unwrap();
        let fc: BTreeSet<Vec<u8>> = fast.entries.iter().map(|e| e.graph.canonical_code()).collect();
        let sc: BTreeSet<Vec<u8>> = slow.entries.iter().map(|e| e.graph.canonical_code()).collect();
        assert_eq!(fc, sc, "nodal catalogs differ at ({g},{k},{l},{m})");
        for (a, b) in fast.entries.iter().zip(&slow.entries) {
            assert_eq!(a.aut, b.aut);
        }
    }
}

#[test]
fn genus_additivity_for_single_components() {
    let lim = limits();
    let mut src = OddCatalogSource::new(lim);
    for (g, k, l) in [(0, 1, 1), (0, 3, 1), (1, 2, 1)] {
        let cat = enumerate_nodal(g, k, l, 0, &mut src, &lim).unwrap();
        for e in &cat.entries {
            let stats = e.graph.validate().unwrap();
            assert_eq!(stats.genus, g);
            assert_eq!(stats.components, 1);
            assert_eq!(stats.nodes, 0);
            let comp = e.graph.components[0].graph.stats().unwrap();
            assert_eq!(comp.genus, stats.genus);
        }
    }
}

#[test]
fn erase_merge_round_trip_across_catalogs() {
    let lim = limits();
    let mut src = OddCatalogSource::new(lim);
    let mut seen = 0usize;
    for (g, k, l, m) in [(0, 5, 1, 2), (0, 1, 2, 1), (1, 0, 1, 1), (0, 3, 1, 2)] {
        let cat = enumerate_nodal(g, k, l, m, &mut src, &lim).unwrap();
        for e in cat.entries.iter().take(100) {
            for comp in &e.graph.components {
                let slot_count: usize = comp.slots.values().map(|v| v.len()).sum();
                if slot_count == 0 {
                    continue;
                }
                let (expanded, inserted) = insert_illegal_points(comp);
                assert_eq!(inserted, slot_count);
                let real: BTreeSet<usize> = comp.roles.keys().copied().collect();
                let erased = erase_unmarked_points(&expanded, &real);
                assert_eq!(
                    erased.canonical_form().0,
                    comp.graph.canonical_form().0,
                    "round trip at ({g},{k},{l},{m})"
                );
                seen += 1;
            }
        }
    }
    assert!(seen > 60, "round trip exercised {seen} components");
}

#[test]
fn odd_subset_empty_for_even_parity() {
    // every signature within the dimension budget, both parities
    for g in 0..=3usize {
        for k in 0..=9usize {
            for l in 0..=4usize {
                let dim = 3 * g as i64 - 3 + k as i64 + 2 * l as i64;
                if dim < 0 || dim > 6 || 2 * g + k + 2 * l <= 2 {
                    continue;
                }
                let cat = match enumerate_open_trivalent(g, k, l, &limits()) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let odd = odd_subset(&cat);
                if (g + k) % 2 == 0 {
                    assert!(odd.is_empty(), "odd subset must vanish at ({g},{k},{l})");
                }
            }
        }
    }
}

/// Walks the boundary circles with the orientation and checks the spin
/// weight formula against the marked-point count.
fn boundary_walks(g: &OpenTrivalentGraph) -> Vec<(Vec<usize>, usize)> {
    let h = g.halfedges();
    let mut vertex_of = vec![0usize; g.n_half()];
    for (vi, v) in h.vertices().iter().enumerate() {
        for &x in v {
            vertex_of[x] = vi;
        }
    }
    let kinds = g.vertex_kinds();
    g.boundary_cycles()
        .iter()
        .map(|cyc| {
            let walk: Vec<usize> = cyc.iter().map(|&b| h.pairing[b]).collect();
            // reorder along the boundary: successive with-orientation halves
            let mut path = vec![walk[0]];
            while path.len() < walk.len() {
                let last = *path.last().unwrap();
                let next = h.rotation[h.pairing[last]];
                path.push(next);
            }
            let marked = cyc
                .iter()
                .filter(|&&x| kinds[vertex_of[x]] == openribbon::ribbon::VertexKind::Marked)
                .count();
            (path, marked)
        })
        .collect()
}

#[test]
fn boundary_and_face_weights_across_catalogs() {
    for (g, k, l) in [(0, 1, 1), (0, 3, 1), (0, 5, 1), (1, 0, 1), (0, 1, 2), (1, 2, 1), (2, 1, 1)] {
        let cat = enumerate_open_trivalent(g, k, l, &limits()).unwrap();
        for e in &cat.entries {
            let sols = solve_kasteleyn(&e.graph).unwrap();
            for kast in &sols {
                for (walk, marked) in boundary_walks(&e.graph) {
                    let qv = q_of_cycle(&e.graph, kast, &walk).unwrap();
                    assert_eq!(qv as usize, (marked + 1) % 2, "boundary weight");
                }
                for face in e.graph.internal_faces() {
                    assert_eq!(q_of_cycle(&e.graph, kast, &face).unwrap(), 0, "face weight");
                }
            }
        }
    }
}

/// Finds some non-backtracking boundary-to-boundary paths.
fn bridge_paths(g: &OpenTrivalentGraph, cap: usize) -> Vec<Vec<usize>> {
    let h = g.halfedges();
    let mut out = Vec::new();
    let starts: Vec<usize> = (0..g.n_half())
        .filter(|&x| g.on_boundary_edge(x) && !g.is_boundary_half(x))
        .collect();
    for &start in &starts {
        let mut stack = vec![vec![start]];
        while let Some(path) = stack.pop() {
            if out.len() >= cap {
                return out;
            }
            let last = *path.last().unwrap();
            if path.len() > 1 && g.on_boundary_edge(last) {
                out.push(path.clone());
                continue;
            }
            if path.len() > 6 {
                continue;
            }
            let arrival = h.pairing[last];
            for cand in 0..g.n_half() {
                if cand == arrival {
                    continue;
                }
                let shares_vertex = h
                    .vertices()
                    .iter()
                    .any(|v| v.contains(&arrival) && v.contains(&cand));
                if shares_vertex {
                    let mut next = path.clone();
                    next.push(cand);
                    stack.push(next);
                }
            }
        }
    }
    out
}

#[test]
fn open_path_weight_reversal_across_catalogs() {
    let mut total = 0usize;
    for (g, k, l) in [(0, 3, 1), (0, 1, 2), (1, 0, 1), (1, 2, 1)] {
        let cat = enumerate_open_trivalent(g, k, l, &limits()).unwrap();
        for e in &cat.entries {
            let sols = solve_kasteleyn(&e.graph).unwrap();
            if sols.is_empty() {
                continue;
            }
            for path in bridge_paths(&e.graph, 12) {
                for kast in &sols {
                    let qv = q_of_path(&e.graph, kast, &path).unwrap();
                    let rev = reverse_path(&e.graph, &path);
                    let qr = q_of_path(&e.graph, kast, &rev).unwrap();
                    assert_eq!((qv + qr) % 2, 1, "reversal law");
                    total += 1;
                }
            }
        }
    }
    assert!(total > 100, "exercised {total} reversal checks");
}

#[test]
fn orientation_signs_constant_on_flip_classes() {
    for (g, k, l) in [(0, 1, 2), (0, 3, 2), (1, 2, 1), (2, 1, 1)] {
        let cat = odd_subset(&enumerate_open_trivalent(g, k, l, &limits()).unwrap());
        for e in &cat.entries {
            // class_signs asserts internally that all representatives of a
            // class carry the same sign
            let table = openribbon::kasteleyn::class_signs(&e.graph).unwrap();
            let stats = e.graph.stats().unwrap();
            assert_eq!(table.classes.len(), 1usize << stats.genus);
        }
    }
}
