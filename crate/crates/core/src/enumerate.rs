//! Exhaustive generation of smooth trivalent open ribbon graphs and of
//! closed trivalent ribbon graphs, up to isomorphism.
//!
//! The generator walks rooted maps directly: permutation entries are
//! decided in breadth-first discovery order, so every leaf of the search
//! is a connected map carrying its own canonical rooted labeling and no
//! isomorph is ever produced twice per root. Unrooted classes are then
//! merged by canonical code. A much slower matching-based oracle
//! (`oracle` module) rebuilds small catalogs independently for tests.

use crate::ribbon::{boundary_assignments, HalfEdgeStructure, OpenTrivalentGraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("signature violates stability: 2g-2+k+2l must be positive")]
    Unstable,
    #[error("resource cap exceeded: {kind} limit {bound}")]
    ResourceCap { kind: &'static str, bound: u64 },
}

/// Search and output caps for the enumerators.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnumLimits {
    pub max_entries: usize,
    pub max_search_nodes: u64,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_entries: 1_000_000,
            max_search_nodes: 500_000_000,
        }
    }
}

/// Catalog signature: open (g,k,l) with an oddness flag, or closed (g,n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signature {
    Open { g: usize, k: usize, l: usize, odd: bool },
    Closed { g: usize, n: usize },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub graph: OpenTrivalentGraph,
    pub aut: u64,
}

/// Isomorphism classes for one signature, sorted by canonical code.
#[derive(Clone, Debug)]
pub struct GraphCatalog {
    pub signature: Signature,
    pub entries: Vec<CatalogEntry>,
}

impl GraphCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Rooted depth-first generation of connected maps with `n2` bivalent and
/// `n3` trivalent vertices on `target` half-edges.
///
/// Permutation entries are decided in discovery order. Partial rotation
/// cycles are open chains; expanding a chain tail may close its cycle,
/// append a fresh half, or splice in another chain's head (a vertex whose
/// halves were discovered through pairings).
struct MapGen<'a, F: FnMut(&HalfEdgeStructure) -> Result<(), EnumError>> {
    target: usize,
    n2: usize,
    n3: usize,
    rot: Vec<usize>,
    pair: Vec<usize>,
    /// rotation preimage where known
    pred: Vec<usize>,
    closed2: usize,
    closed3: usize,
    next_id: usize,
    nodes: u64,
    node_cap: u64,
    visit: &'a mut F,
}

const UNSET: usize = usize::MAX;

impl<'a, F: FnMut(&HalfEdgeStructure) -> Result<(), EnumError>> MapGen<'a, F> {
    fn run(
        target: usize,
        n2: usize,
        n3: usize,
        node_cap: u64,
        visit: &'a mut F,
    ) -> Result<(), EnumError> {
        if target == 0 || 2 * n2 + 3 * n3 != target {
            return Ok(());
        }
        let mut gen = MapGen {
            target,
            n2,
            n3,
            rot: vec![UNSET; target],
            pair: vec![UNSET; target],
            pred: vec![UNSET; target],
            closed2: 0,
            closed3: 0,
            next_id: 1,
            nodes: 0,
            node_cap,
            visit,
        };
        gen.explore(0)
    }

    fn head(&self, mut h: usize) -> usize {
        while self.pred[h] != UNSET {
            h = self.pred[h];
        }
        h
    }

    fn chain_len(&self, head: usize) -> usize {
        let mut len = 1;
        let mut x = head;
        while self.rot[x] != UNSET {
            x = self.rot[x];
            len += 1;
        }
        len
    }

    fn explore(&mut self, h: usize) -> Result<(), EnumError> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(EnumError::ResourceCap {
                kind: "search nodes",
                bound: self.node_cap,
            });
        }
        if h == self.next_id {
            if self.next_id == self.target && self.closed2 == self.n2 && self.closed3 == self.n3 {
                let structure = HalfEdgeStructure {
                    rotation: self.rot.clone(),
                    pairing: self.pair.clone(),
                };
                (self.visit)(&structure)?;
            }
            return Ok(());
        }
        if self.rot[h] != UNSET {
            // rotation already decided when an earlier tail spliced past h
            return self.after_rot(h);
        }
        let hd = self.head(h);
        let len = self.chain_len(hd);
        // close the rotation cycle
        if (len == 2 && self.closed2 < self.n2) || (len == 3 && self.closed3 < self.n3) {
            self.rot[h] = hd;
            self.pred[hd] = h;
            if len == 2 {
                self.closed2 += 1;
            } else {
                self.closed3 += 1;
            }
            self.after_rot(h)?;
            if len == 2 {
                self.closed2 -= 1;
            } else {
                self.closed3 -= 1;
            }
            self.pred[hd] = UNSET;
            self.rot[h] = UNSET;
        }
        if len < 3 {
            // append a fresh half to this vertex
            if self.next_id < self.target {
                let new = self.next_id;
                self.next_id += 1;
                self.rot[h] = new;
                self.pred[new] = h;
                self.after_rot(h)?;
                self.pred[new] = UNSET;
                self.rot[h] = UNSET;
                self.next_id -= 1;
            }
            // splice in another chain discovered through pairings
            for j in 0..self.next_id {
                if j == hd || self.pred[j] != UNSET || j == h {
                    continue;
                }
                if self.head(j) != j {
                    continue;
                }
                if len + self.chain_len(j) > 3 {
                    continue;
                }
                self.rot[h] = j;
                self.pred[j] = h;
                self.after_rot(h)?;
                self.pred[j] = UNSET;
                self.rot[h] = UNSET;
            }
        }
        Ok(())
    }

    fn after_rot(&mut self, h: usize) -> Result<(), EnumError> {
        if self.pair[h] != UNSET {
            return self.explore(h + 1);
        }
        // fresh partner seeding a new chain
        if self.next_id < self.target {
            let new = self.next_id;
            self.next_id += 1;
            self.pair[h] = new;
            self.pair[new] = h;
            self.explore(h + 1)?;
            self.pair[new] = UNSET;
            self.pair[h] = UNSET;
            self.next_id -= 1;
        }
        // pair with an existing unmatched half
        for j in (h + 1)..self.next_id {
            if self.pair[j] != UNSET {
                continue;
            }
            self.pair[h] = j;
            self.pair[j] = h;
            self.explore(h + 1)?;
            self.pair[j] = UNSET;
            self.pair[h] = UNSET;
        }
        Ok(())
    }
}

/// Assigns all face labelings `1..=l` and point labelings `1..=k` to an
/// unlabeled graph, feeding each decorated graph to `sink`.
fn all_labelings(
    g0: &OpenTrivalentGraph,
    l: usize,
    k: usize,
    sink: &mut impl FnMut(OpenTrivalentGraph),
) {
    let nfaces = g0.internal_faces().len();
    let marked = g0.marked_vertices();
    if nfaces != l || marked.len() != k {
        return;
    }
    let face_perms = permutations(l);
    let point_perms = permutations(k);
    for fp in &face_perms {
        let face_labels: BTreeMap<usize, usize> =
            (0..l).map(|i| (i, fp[i] + 1)).collect();
        for pp in &point_perms {
            let point_labels: BTreeMap<usize, usize> =
                marked.iter().enumerate().map(|(i, &v)| (v, pp[i] + 1)).collect();
            if let Ok(g) = g0.with_labels(face_labels.clone(), point_labels) {
                sink(g);
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

/// The two trivalent ghosts: three labeled points in the two cyclic orders.
pub fn ghost_graphs() -> Vec<OpenTrivalentGraph> {
    let rotation = vec![1, 0, 3, 2, 5, 4];
    let pairing = vec![3, 4, 5, 0, 1, 2];
    let h = HalfEdgeStructure::new(rotation, pairing).unwrap();
    let mut out = Vec::new();
    for labels in [[1, 2, 3], [1, 3, 2]] {
        let point_labels = BTreeMap::from([(0, labels[0]), (1, labels[1]), (2, labels[2])]);
        out.push(OpenTrivalentGraph::new_ghost(h.clone(), &[1, 3, 5], point_labels).unwrap());
    }
    out
}

fn collect_catalog(
    signature: Signature,
    classes: BTreeMap<Vec<u8>, CatalogEntry>,
) -> GraphCatalog {
    GraphCatalog {
        signature,
        entries: classes.into_values().collect(),
    }
}

/// All isomorphism classes of connected smooth trivalent (g,k,l)-graphs
/// with faces labeled 1..=l and boundary points labeled 1..=k. For l = 0
/// the only inhabitants are the two ghosts at (g,k) = (0,3).
pub fn enumerate_open_trivalent(
    g: usize,
    k: usize,
    l: usize,
    limits: &EnumLimits,
) -> Result<GraphCatalog, EnumError> {
    let signature = Signature::Open { g, k, l, odd: false };
    if 2 * g + k + 2 * l <= 2 {
        return Err(EnumError::Unstable);
    }
    let mut classes: BTreeMap<Vec<u8>, CatalogEntry> = BTreeMap::new();
    if l == 0 {
        if (g, k) == (0, 3) {
            for gg in ghost_graphs() {
                let (code, _) = gg.canonical_form();
                let aut = gg.automorphisms().len() as u64;
                classes.insert(code, CatalogEntry { graph: gg, aut });
            }
        }
        return Ok(collect_catalog(signature, classes));
    }
    // edge count is pinned by trivalence and Euler characteristic
    let e = (3 * g + 3 * l + k) as i64 - 3;
    if e <= 0 {
        return Ok(collect_catalog(signature, classes));
    }
    let n_half = 2 * e as usize;
    if (n_half + k) % 3 != 0 {
        return Ok(collect_catalog(signature, classes));
    }
    let v = (n_half + k) / 3;
    if v < k {
        return Ok(collect_catalog(signature, classes));
    }
    let n3 = v - k;
    let max_entries = limits.max_entries;
    let mut cap_hit: Option<EnumError> = None;
    {
        let mut visit = |h: &HalfEdgeStructure| -> Result<(), EnumError> {
            for bd in boundary_assignments(h) {
                let g0 = match OpenTrivalentGraph::new(
                    h.clone(),
                    &bd,
                    BTreeMap::new(),
                    BTreeMap::new(),
                ) {
                    Ok(g0) => g0,
                    Err(_) => continue,
                };
                let stats = match g0.stats() {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                if stats.genus != g || stats.faces != l || stats.boundary_points != k {
                    continue;
                }
                let mut cap = None;
                all_labelings(&g0, l, k, &mut |dg| {
                    if classes.len() >= max_entries && cap.is_none() {
                        cap = Some(EnumError::ResourceCap {
                            kind: "catalog entries",
                            bound: max_entries as u64,
                        });
                        return;
                    }
                    let (code, _) = dg.canonical_form();
                    classes.entry(code).or_insert_with(|| {
                        let aut = dg.automorphisms().len() as u64;
                        CatalogEntry { graph: dg, aut }
                    });
                });
                if let Some(c) = cap {
                    return Err(c);
                }
            }
            Ok(())
        };
        match MapGen::run(n_half, k, n3, limits.max_search_nodes, &mut visit) {
            Ok(()) => {}
            Err(e) => cap_hit = Some(e),
        }
    }
    if let Some(e) = cap_hit {
        return Err(e);
    }
    Ok(collect_catalog(signature, classes))
}

/// All isomorphism classes of connected closed trivalent ribbon graphs of
/// genus g with n labeled faces.
pub fn enumerate_closed_trivalent(
    g: usize,
    n: usize,
    limits: &EnumLimits,
) -> Result<GraphCatalog, EnumError> {
    let signature = Signature::Closed { g, n };
    if n == 0 || 2 * g + n <= 2 {
        return Err(EnumError::Unstable);
    }
    let mut classes: BTreeMap<Vec<u8>, CatalogEntry> = BTreeMap::new();
    let e = 6 * (g as i64) - 6 + 3 * n as i64;
    if e <= 0 {
        return Ok(collect_catalog(signature, classes));
    }
    let n_half = 2 * e as usize;
    let n3 = n_half / 3;
    let max_entries = limits.max_entries;
    let mut cap_hit: Option<EnumError> = None;
    {
        let mut visit = |h: &HalfEdgeStructure| -> Result<(), EnumError> {
            let g0 = match OpenTrivalentGraph::new(h.clone(), &[], BTreeMap::new(), BTreeMap::new())
            {
                Ok(g0) => g0,
                Err(_) => return Ok(()),
            };
            let stats = match g0.stats() {
                Ok(s) => s,
                Err(_) => return Ok(()),
            };
            if stats.surface_genus != g || stats.faces != n {
                return Ok(());
            }
            let mut cap = None;
            all_labelings(&g0, n, 0, &mut |dg| {
                if classes.len() >= max_entries && cap.is_none() {
                    cap = Some(EnumError::ResourceCap {
                        kind: "catalog entries",
                        bound: max_entries as u64,
                    });
                    return;
                }
                let (code, _) = dg.canonical_form();
                classes.entry(code).or_insert_with(|| {
                    let aut = dg.automorphisms().len() as u64;
                    CatalogEntry { graph: dg, aut }
                });
            });
            if let Some(c) = cap {
                return Err(c);
            }
            Ok(())
        };
        match MapGen::run(n_half, 0, n3, limits.max_search_nodes, &mut visit) {
            Ok(()) => {}
            Err(e) => cap_hit = Some(e),
        }
    }
    if let Some(e) = cap_hit {
        return Err(e);
    }
    Ok(collect_catalog(signature, classes))
}

/// Keeps the graphs whose boundary circles all carry an odd number of
/// marked points.
pub fn odd_subset(catalog: &GraphCatalog) -> GraphCatalog {
    let signature = match catalog.signature {
        Signature::Open { g, k, l, .. } => Signature::Open { g, k, l, odd: true },
        s @ Signature::Closed { .. } => s,
    };
    GraphCatalog {
        signature,
        entries: catalog
            .entries
            .iter()
            .filter(|e| e.graph.is_odd())
            .cloned()
            .collect(),
    }
}

/// Matching-based reference enumeration, independent of the rooted search.
///
/// Rotations are pinned to fixed canonical cycles and every fixed-point-free
/// involution on the half-edge set is tried; only feasible for small n.
pub mod oracle {
    use super::*;

    fn fixed_rotation(n2: usize, n3: usize) -> Vec<usize> {
        let mut rot = Vec::with_capacity(2 * n2 + 3 * n3);
        for v in 0..n2 {
            let base = 2 * v;
            rot.extend_from_slice(&[base + 1, base]);
        }
        for v in 0..n3 {
            let base = 2 * n2 + 3 * v;
            rot.extend_from_slice(&[base + 1, base + 2, base]);
        }
        // rot currently maps position->next within each cycle
        rot
    }

    fn matchings(n: usize, visit: &mut impl FnMut(&[usize])) {
        fn rec(pair: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
            let h = match pair.iter().position(|&p| p == UNSET) {
                None => {
                    visit(pair);
                    return;
                }
                Some(h) => h,
            };
            for j in (h + 1)..pair.len() {
                if pair[j] != UNSET {
                    continue;
                }
                pair[h] = j;
                pair[j] = h;
                rec(pair, visit);
                pair[j] = UNSET;
                pair[h] = UNSET;
            }
        }
        let mut pair = vec![UNSET; n];
        rec(&mut pair, visit);
    }

    /// Brute-force open catalog for n_half <= 12.
    pub fn open_catalog(g: usize, k: usize, l: usize) -> GraphCatalog {
        let signature = Signature::Open { g, k, l, odd: false };
        let mut classes: BTreeMap<Vec<u8>, CatalogEntry> = BTreeMap::new();
        if l == 0 {
            if (g, k) == (0, 3) {
                for gg in ghost_graphs() {
                    let (code, _) = gg.canonical_form();
                    let aut = gg.automorphisms().len() as u64;
                    classes.insert(code, CatalogEntry { graph: gg, aut });
                }
            }
            return collect_catalog(signature, classes);
        }
        let e = (3 * g + 3 * l + k) as i64 - 3;
        if e <= 0 {
            return collect_catalog(signature, classes);
        }
        let n_half = 2 * e as usize;
        assert!(n_half <= 12, "oracle is for small signatures only");
        if (n_half + k) % 3 != 0 || (n_half + k) / 3 < k {
            return collect_catalog(signature, classes);
        }
        let n3 = (n_half + k) / 3 - k;
        let rot = fixed_rotation(k, n3);
        matchings(n_half, &mut |pair| {
            let h = match HalfEdgeStructure::new(rot.clone(), pair.to_vec()) {
                Ok(h) => h,
                Err(_) => return,
            };
            if !h.is_connected() {
                return;
            }
            for bd in boundary_assignments(&h) {
                let g0 =
                    match OpenTrivalentGraph::new(h.clone(), &bd, BTreeMap::new(), BTreeMap::new())
                    {
                        Ok(g0) => g0,
                        Err(_) => continue,
                    };
                let stats = match g0.stats() {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                if stats.genus != g || stats.faces != l || stats.boundary_points != k {
                    continue;
                }
                all_labelings(&g0, l, k, &mut |dg| {
                    let (code, _) = dg.canonical_form();
                    classes.entry(code).or_insert_with(|| {
                        let aut = dg.automorphisms().len() as u64;
                        CatalogEntry { graph: dg, aut }
                    });
                });
            }
        });
        collect_catalog(signature, classes)
    }

    /// Brute-force closed catalog for n_half <= 12.
    pub fn closed_catalog(g: usize, n: usize) -> GraphCatalog {
        let signature = Signature::Closed { g, n };
        let mut classes: BTreeMap<Vec<u8>, CatalogEntry> = BTreeMap::new();
        let e = 6 * (g as i64) - 6 + 3 * n as i64;
        if e <= 0 {
            return collect_catalog(signature, classes);
        }
        let n_half = 2 * e as usize;
        assert!(n_half <= 12, "oracle is for small signatures only");
        let rot = fixed_rotation(0, n_half / 3);
        matchings(n_half, &mut |pair| {
            let h = match HalfEdgeStructure::new(rot.clone(), pair.to_vec()) {
                Ok(h) => h,
                Err(_) => return,
            };
            if !h.is_connected() {
                return;
            }
            let g0 = match OpenTrivalentGraph::new(h, &[], BTreeMap::new(), BTreeMap::new()) {
                Ok(g0) => g0,
                Err(_) => return,
            };
            let stats = match g0.stats() {
                Ok(s) => s,
                Err(_) => return,
            };
            if stats.surface_genus != g || stats.faces != n {
                return;
            }
            all_labelings(&g0, n, 0, &mut |dg| {
                let (code, _) = dg.canonical_form();
                classes.entry(code).or_insert_with(|| {
                    let aut = dg.automorphisms().len() as u64;
                    CatalogEntry { graph: dg, aut }
                });
            });
        });
        collect_catalog(signature, classes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> EnumLimits {
        EnumLimits::default()
    }

    #[test]
    fn ghosts_at_0_3_0() {
        let c = enumerate_open_trivalent(0, 3, 0, &limits()).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.entries.iter().all(|e| e.aut == 1));
    }

    #[test]
    fn disk_at_0_1_1() {
        let c = enumerate_open_trivalent(0, 1, 1, &limits()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.entries[0].aut, 1);
        let s = c.entries[0].graph.stats().unwrap();
        assert_eq!((s.genus, s.boundaries, s.faces), (0, 1, 1));
    }

    #[test]
    fn pentagon_count_at_0_5_1() {
        let c = enumerate_open_trivalent(0, 5, 1, &limits()).unwrap();
        assert_eq!(c.len(), 24);
        assert!(c.entries.iter().all(|e| e.aut == 1));
        let odd = odd_subset(&c);
        assert_eq!(odd.len(), 24);
    }

    #[test]
    fn annulus_at_1_0_1_not_odd() {
        let c = enumerate_open_trivalent(1, 0, 1, &limits()).unwrap();
        assert!(!c.is_empty());
        assert_eq!(odd_subset(&c).len(), 0);
    }

    #[test]
    fn closed_0_1_is_empty() {
        // no trivalent graph exists: E = 6g-6+3n = -3
        let c = enumerate_closed_trivalent(0, 1, &limits());
        assert!(c.is_err()); // unstable signature
        let c = enumerate_closed_trivalent(0, 3, &limits()).unwrap();
        assert!(!c.is_empty());
    }

    #[test]
    fn rooted_generation_matches_oracle_small() {
        for (g, k, l) in [(0, 1, 1), (0, 3, 1), (0, 1, 2), (1, 0, 1), (0, 5, 1)] {
            let fast = enumerate_open_trivalent(g, k, l, &limits()).unwrap();
            let slow = oracle::open_catalog(g, k, l);
            let fast_codes: Vec<_> =
                fast.entries.iter().map(|e| e.graph.canonical_form().0).collect();
            let slow_codes: Vec<_> =
                slow.entries.iter().map(|e| e.graph.canonical_form().0).collect();
            assert_eq!(fast_codes, slow_codes, "mismatch at ({g},{k},{l})");
            for (a, b) in fast.entries.iter().zip(&slow.entries) {
                assert_eq!(a.aut, b.aut);
            }
        }
    }

    #[test]
    fn closed_generation_matches_oracle_small() {
        for (g, n) in [(0, 3), (1, 1), (1, 2)] {
            let fast = enumerate_closed_trivalent(g, n, &limits()).unwrap();
            let slow = oracle::closed_catalog(g, n);
            assert_eq!(fast.len(), slow.len(), "mismatch at ({g},{n})");
            let fast_codes: Vec<_> =
                fast.entries.iter().map(|e| e.graph.canonical_form().0).collect();
            let slow_codes: Vec<_> =
                slow.entries.iter().map(|e| e.graph.canonical_form().0).collect();
            assert_eq!(fast_codes, slow_codes);
        }
    }

    #[test]
    fn resource_cap_fires() {
        let tiny = EnumLimits {
            max_entries: 2,
            max_search_nodes: u64::MAX,
        };
        let r = enumerate_open_trivalent(0, 5, 1, &tiny);
        assert!(matches!(r, Err(EnumError::ResourceCap { .. })));
    }
}
