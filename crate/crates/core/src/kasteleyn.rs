//! Kasteleyn orientations on smooth trivalent open graphs.
//!
//! An orientation assigns a bit to every half-edge: forced to 1 on the
//! with-orientation half of each boundary edge, forced to 0 on boundary
//! halves, antisymmetric across internal edges, and summing to 1 over
//! every face. The solution set is an affine GF(2) space; vertex flips at
//! internal vertices act on it with orbits of size exactly 2^{|V^I|}, and
//! the signed count of flip classes is the spin constant c_spin.

use crate::ribbon::{OpenTrivalentGraph, VertexKind};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KasteleynError {
    #[error("too many internal edges for the bit-packed solver: {0}")]
    TooManyEdges(usize),
    #[error("solution space too large to enumerate: nullity {0}")]
    TooManySolutions(usize),
    #[error("flip orbit of size {found} differs from 2^|V^I| = {expected}")]
    BadOrbitSize { found: usize, expected: usize },
    #[error("orientation-form signs disagree within one flip class")]
    SignMismatchInClass,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("halves {0} and {1} are not consecutive at a vertex")]
    NotConsecutive(usize, usize),
    #[error("path backtracks at half {0}")]
    Backtracks(usize),
    #[error("open path endpoints must lie on boundary edges")]
    EndpointNotOnBoundary,
}

/// Bit assignment on half-edges; boundary halves carry 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KasteleynOrientation {
    pub bits: Vec<bool>,
}

impl KasteleynOrientation {
    pub fn value(&self, h: usize) -> u8 {
        self.bits[h] as u8
    }
}

/// Flip-class representatives with their orientation-form signs.
#[derive(Clone, Debug)]
pub struct SignedClassTable {
    pub classes: Vec<(KasteleynOrientation, i8)>,
    /// edge representatives (smaller half of each edge), ascending
    pub reference_order: Vec<usize>,
}

/// Per-graph summary for reports.
#[derive(Clone, Debug, Serialize)]
pub struct KasteleynReport {
    pub solutions: usize,
    pub classes: usize,
    pub c_spin: u64,
    pub expected_c_spin: u64,
    pub matches: bool,
}

struct Gf2System {
    /// one row per face: edge-variable mask plus right-hand side
    rows: Vec<(u128, bool)>,
    nedges: usize,
}

fn internal_edge_reps(g: &OpenTrivalentGraph) -> Vec<usize> {
    let h = g.halfedges();
    h.edges()
        .into_iter()
        .filter(|&e| !g.on_boundary_edge(e))
        .collect()
}

fn build_system(g: &OpenTrivalentGraph) -> Result<(Gf2System, Vec<usize>), KasteleynError> {
    let reps = internal_edge_reps(g);
    if reps.len() > 120 {
        return Err(KasteleynError::TooManyEdges(reps.len()));
    }
    let h = g.halfedges();
    let mut var_of = vec![usize::MAX; g.n_half()];
    for (i, &e) in reps.iter().enumerate() {
        var_of[e] = i;
        var_of[h.pairing[e]] = i;
    }
    let mut rows = Vec::new();
    for face in g.internal_faces() {
        let mut mask = 0u128;
        let mut rhs = true; // sum must equal 1
        for &x in &face {
            if g.on_boundary_edge(x) {
                // with-orientation half of a boundary edge: forced 1
                rhs ^= true;
            } else if x < h.pairing[x] {
                mask ^= 1 << var_of[x];
            } else {
                // opposite half contributes 1 + x_e
                rhs ^= true;
                mask ^= 1 << var_of[x];
            }
        }
        rows.push((mask, rhs));
    }
    Ok((
        Gf2System {
            rows,
            nedges: reps.len(),
        },
        reps,
    ))
}

fn solve_gf2(system: &Gf2System) -> Option<(u128, Vec<u128>)> {
    let n = system.nedges;
    let mut rows = system.rows.clone();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0 & (1 << col) != 0) else {
            continue;
        };
        rows.swap(r, p);
        let (prow, prhs) = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0 & (1 << col) != 0 {
                row.0 ^= prow;
                row.1 ^= prhs;
            }
        }
        pivot_col_of_row.push(col);
        r += 1;
    }
    // inconsistent when a zero row demands 1
    for row in rows.iter().skip(r) {
        if row.0 == 0 && row.1 {
            return None;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let is_pivot = |c: usize| pivot_cols.contains(&c);
    let mut particular = 0u128;
    for (i, &col) in pivot_col_of_row.iter().enumerate() {
        if rows[i].1 {
            particular |= 1 << col;
        }
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot(c)) {
        let mut v = 1u128 << free;
        for (i, &col) in pivot_col_of_row.iter().enumerate() {
            if rows[i].0 & (1 << free) != 0 {
                v ^= 1 << col;
            }
        }
        basis.push(v);
    }
    Some((particular, basis))
}

fn orientation_from_mask(g: &OpenTrivalentGraph, reps: &[usize], mask: u128) -> KasteleynOrientation {
    let h = g.halfedges();
    let mut bits = vec![false; g.n_half()];
    for x in 0..g.n_half() {
        if g.is_boundary_half(x) {
            continue;
        }
        if g.on_boundary_edge(x) {
            bits[x] = true;
            continue;
        }
        let e = x.min(h.pairing[x]);
        let var = reps.iter().position(|&r| r == e).unwrap();
        let bit = mask & (1 << var) != 0;
        bits[x] = if x == e { bit } else { !bit };
    }
    KasteleynOrientation { bits }
}

/// The full affine solution set of the constraint system, sorted.
/// Empty set is a valid answer (it occurs exactly off the parity range).
pub fn solve_kasteleyn(g: &OpenTrivalentGraph) -> Result<Vec<KasteleynOrientation>, KasteleynError> {
    let (system, reps) = build_system(g)?;
    let Some((particular, basis)) = solve_gf2(&system) else {
        return Ok(Vec::new());
    };
    if basis.len() > 24 {
        return Err(KasteleynError::TooManySolutions(basis.len()));
    }
    let mut masks = Vec::with_capacity(1 << basis.len());
    for sel in 0u32..(1 << basis.len()) {
        let mut m = particular;
        for (i, b) in basis.iter().enumerate() {
            if sel & (1 << i) != 0 {
                m ^= b;
            }
        }
        masks.push(m);
    }
    masks.sort_unstable();
    masks.dedup();
    let mut out: Vec<KasteleynOrientation> = masks
        .into_iter()
        .map(|m| orientation_from_mask(g, &reps, m))
        .collect();
    out.sort();
    Ok(out)
}

fn internal_vertex_flip_masks(g: &OpenTrivalentGraph, reps: &[usize]) -> Vec<u128> {
    let h = g.halfedges();
    let vertices = h.vertices();
    let kinds = g.vertex_kinds();
    let mut vertex_of = vec![0usize; g.n_half()];
    for (vi, v) in vertices.iter().enumerate() {
        for &x in v {
            vertex_of[x] = vi;
        }
    }
    let mut masks = Vec::new();
    for (vi, kind) in kinds.iter().enumerate() {
        if *kind != VertexKind::Internal {
            continue;
        }
        let mut m = 0u128;
        for (var, &e) in reps.iter().enumerate() {
            let endpoints = (vertex_of[e], vertex_of[h.pairing[e]]);
            let incident = (endpoints.0 == vi) as u8 + (endpoints.1 == vi) as u8;
            if incident == 1 {
                m ^= 1 << var;
            }
        }
        masks.push(m);
    }
    masks
}

fn mask_of_orientation(_g: &OpenTrivalentGraph, reps: &[usize], k: &KasteleynOrientation) -> u128 {
    let mut m = 0u128;
    for (var, &e) in reps.iter().enumerate() {
        if k.bits[e] {
            m |= 1 << var;
        }
    }
    m
}

/// Partitions the solution set into vertex-flip orbits. Every orbit must
/// have size exactly 2^{|V^I|}; anything else is flagged as an internal
/// inconsistency.
pub fn flip_quotient(
    g: &OpenTrivalentGraph,
    solutions: &[KasteleynOrientation],
) -> Result<Vec<Vec<usize>>, KasteleynError> {
    let reps = internal_edge_reps(g);
    let flips = internal_vertex_flip_masks(g, &reps);
    let n_internal = flips.len();
    let masks: Vec<u128> = solutions
        .iter()
        .map(|k| mask_of_orientation(g, &reps, k))
        .collect();
    let mut orbit_of = vec![usize::MAX; solutions.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..solutions.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut frontier = vec![masks[start]];
        while let Some(m) = frontier.pop() {
            for f in &flips {
                let m2 = m ^ f;
                if let Some(j) = masks.iter().position(|&x| x == m2) {
                    if orbit_of[j] == usize::MAX {
                        orbit_of[j] = id;
                        members.push(j);
                        frontier.push(m2);
                    }
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    let expected = 1usize << n_internal;
    for orbit in &orbits {
        if orbit.len() != expected {
            return Err(KasteleynError::BadOrbitSize {
                found: orbit.len(),
                expected,
            });
        }
    }
    Ok(orbits)
}

fn turn_is_bad(g: &OpenTrivalentGraph, prev: usize, cur: usize) -> Result<bool, PathError> {
    let h = g.halfedges();
    let arrival = h.pairing[prev];
    if cur == arrival {
        return Err(PathError::Backtracks(cur));
    }
    let vertices = h.vertices();
    let vlen = vertices
        .iter()
        .find(|v| v.contains(&arrival))
        .map(|v| v.len())
        .unwrap();
    // consecutive halves must share the turn vertex
    let same_vertex = vertices
        .iter()
        .any(|v| v.contains(&arrival) && v.contains(&cur));
    if !same_vertex {
        return Err(PathError::NotConsecutive(prev, cur));
    }
    if vlen == 2 {
        // marked point: the grading alternates only when arriving against
        // the boundary orientation
        Ok(g.is_boundary_half(prev))
    } else {
        Ok(cur == h.rotation[arrival])
    }
}

fn path_weight(
    g: &OpenTrivalentGraph,
    k: &KasteleynOrientation,
    path: &[usize],
    closed: bool,
) -> Result<u8, PathError> {
    if path.is_empty() {
        return Err(PathError::Empty);
    }
    let mut sum = 1u32;
    for &x in path {
        sum += k.value(x) as u32;
    }
    let steps: Vec<(usize, usize)> = if closed {
        (0..path.len())
            .map(|i| (path[i], path[(i + 1) % path.len()]))
            .collect()
    } else {
        (0..path.len() - 1).map(|i| (path[i], path[i + 1])).collect()
    };
    for (prev, cur) in steps {
        if turn_is_bad(g, prev, cur)? {
            sum += 1;
        }
    }
    Ok((sum % 2) as u8)
}

/// Spin weight of a closed non-backtracking directed edge path,
/// independent of traversal orientation.
pub fn q_of_cycle(
    g: &OpenTrivalentGraph,
    k: &KasteleynOrientation,
    path: &[usize],
) -> Result<u8, PathError> {
    path_weight(g, k, path, true)
}

/// Spin weight of a boundary-to-boundary directed path; flips under
/// orientation reversal.
pub fn q_of_path(
    g: &OpenTrivalentGraph,
    k: &KasteleynOrientation,
    path: &[usize],
) -> Result<u8, PathError> {
    if path.is_empty() {
        return Err(PathError::Empty);
    }
    let first = path[0];
    let last = *path.last().unwrap();
    if !g.on_boundary_edge(first) || !g.on_boundary_edge(last) {
        return Err(PathError::EndpointNotOnBoundary);
    }
    path_weight(g, k, path, false)
}

/// Reverses a directed edge path.
pub fn reverse_path(g: &OpenTrivalentGraph, path: &[usize]) -> Vec<usize> {
    let h = g.halfedges();
    path.iter().rev().map(|&x| h.pairing[x]).collect()
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// The orientation form of one Kasteleyn orientation, realized as a signed
/// permutation of the edge set: faces in label order, within each face the
/// bit-1 halves in face-cyclic order starting from the smallest id.
fn orientation_sign(g: &OpenTrivalentGraph, k: &KasteleynOrientation, reference: &[usize]) -> i8 {
    let h = g.halfedges();
    let faces = g.internal_faces();
    let mut by_label: Vec<(usize, &Vec<usize>)> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (*g.face_labels().get(&i).unwrap_or(&0), f))
        .collect();
    by_label.sort_by_key(|(l, _)| *l);
    let mut listing: Vec<usize> = Vec::with_capacity(reference.len());
    for (_, face) in by_label {
        let ones: Vec<usize> = face.iter().copied().filter(|&x| k.bits[x]).collect();
        assert!(ones.len() % 2 == 1, "face must carry an odd number of set bits");
        // start at the cycle position of the smallest set half
        let start_half = *ones.iter().min().unwrap();
        let start = face.iter().position(|&x| x == start_half).unwrap();
        for i in 0..face.len() {
            let x = face[(start + i) % face.len()];
            if k.bits[x] {
                listing.push(x.min(h.pairing[x]));
            }
        }
    }
    assert_eq!(listing.len(), reference.len(), "every edge listed exactly once");
    let perm: Vec<usize> = listing
        .iter()
        .map(|e| reference.iter().position(|r| r == e).unwrap())
        .collect();
    permutation_sign(&perm)
}

/// Flip-class representatives with signs, plus the reference edge order.
/// A ghost has no faces, so its orientation form is the empty wedge and
/// its single class carries sign +1.
pub fn class_signs(g: &OpenTrivalentGraph) -> Result<SignedClassTable, KasteleynError> {
    let solutions = solve_kasteleyn(g)?;
    let reference: Vec<usize> = if g.is_ghost() {
        Vec::new()
    } else {
        g.halfedges().edges()
    };
    if solutions.is_empty() {
        return Ok(SignedClassTable {
            classes: Vec::new(),
            reference_order: reference,
        });
    }
    let orbits = flip_quotient(g, &solutions)?;
    let mut classes = Vec::new();
    for orbit in orbits {
        let signs: Vec<i8> = orbit
            .iter()
            .map(|&i| orientation_sign(g, &solutions[i], &reference))
            .collect();
        if signs.iter().any(|&s| s != signs[0]) {
            return Err(KasteleynError::SignMismatchInClass);
        }
        classes.push((solutions[orbit[0]].clone(), signs[0]));
    }
    Ok(SignedClassTable {
        classes,
        reference_order: reference,
    })
}

/// |Σ over flip classes of the orientation-form sign|.
pub fn c_spin(g: &OpenTrivalentGraph) -> Result<u64, KasteleynError> {
    let table = class_signs(g)?;
    let total: i64 = table.classes.iter().map(|(_, s)| *s as i64).sum();
    Ok(total.unsigned_abs())
}

/// The value 2^{(g+b-1)/2} promised for odd graphs, 0 otherwise.
pub fn expected_c_spin(g: &OpenTrivalentGraph) -> u64 {
    let stats = match g.stats() {
        Ok(s) => s,
        Err(_) => return 0,
    };
    if !g.is_odd() {
        return 0;
    }
    let e = stats.genus + stats.boundaries - 1;
    if e % 2 != 0 {
        return 0;
    }
    1u64 << (e / 2)
}

pub fn report(g: &OpenTrivalentGraph) -> Result<KasteleynReport, KasteleynError> {
    let solutions = solve_kasteleyn(g)?;
    let classes = if solutions.is_empty() {
        0
    } else {
        flip_quotient(g, &solutions)?.len()
    };
    let c = c_spin(g)?;
    let expected = expected_c_spin(g);
    Ok(KasteleynReport {
        solutions: solutions.len(),
        classes,
        c_spin: c,
        expected_c_spin: expected,
        matches: c == expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::HalfEdgeStructure;
    use std::collections::BTreeMap;

    fn disk() -> OpenTrivalentGraph {
        let h = HalfEdgeStructure::new(vec![1, 0], vec![1, 0]).unwrap();
        OpenTrivalentGraph::new(
            h,
            &[0],
            BTreeMap::from([(0, 1)]),
            BTreeMap::from([(0, 1)]),
        )
        .unwrap()
    }

    /// Annulus: two boundary loops joined by one internal edge, one face.
    fn annulus() -> OpenTrivalentGraph {
        let h = HalfEdgeStructure::new(vec![1, 2, 0, 4, 5, 3], vec![1, 0, 5, 4, 3, 2]).unwrap();
        OpenTrivalentGraph::new(h, &[0, 3], BTreeMap::from([(0, 1)]), BTreeMap::new()).unwrap()
    }

    /// Disk with two crossed internal bands: genus 2 double, one face,
    /// one marked point.
    pub fn crossed_handle() -> OpenTrivalentGraph {
        let mut rotation = vec![0; 14];
        rotation[0] = 1;
        rotation[1] = 0;
        rotation[2] = 4;
        rotation[4] = 3;
        rotation[3] = 2;
        rotation[5] = 7;
        rotation[7] = 6;
        rotation[6] = 5;
        rotation[8] = 10;
        rotation[10] = 9;
        rotation[9] = 8;
        rotation[11] = 13;
        rotation[13] = 12;
        rotation[12] = 11;
        let mut pairing = vec![0; 14];
        for (a, b) in [(0, 3), (2, 6), (5, 9), (8, 12), (11, 1), (4, 10), (7, 13)] {
            pairing[a] = b;
            pairing[b] = a;
        }
        let h = HalfEdgeStructure::new(rotation, pairing).unwrap();
        OpenTrivalentGraph::new(
            h,
            &[1, 3, 6, 9, 12],
            BTreeMap::from([(0, 1)]),
            BTreeMap::from([(0, 1)]),
        )
        .unwrap()
    }

    #[test]
    fn disk_has_one_forced_solution() {
        let d = disk();
        let sols = solve_kasteleyn(&d).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].bits[1] && !sols[0].bits[0]);
        assert_eq!(c_spin(&d).unwrap(), 1);
        assert_eq!(expected_c_spin(&d), 1);
    }

    #[test]
    fn annulus_classes_and_vanishing() {
        let a = annulus();
        let stats = a.stats().unwrap();
        assert_eq!(stats.genus, 1);
        let sols = solve_kasteleyn(&a).unwrap();
        assert_eq!(sols.len(), 2); // 2^g classes, no internal vertices
        let orbits = flip_quotient(&a, &sols).unwrap();
        assert_eq!(orbits.len(), 2);
        assert!(orbits.iter().all(|o| o.len() == 1));
        // both boundary circles carry zero marked points
        assert_eq!(c_spin(&a).unwrap(), 0);
        assert_eq!(expected_c_spin(&a), 0);
    }

    #[test]
    fn boundary_circle_weight_is_point_count_plus_one() {
        let d = disk();
        let sols = solve_kasteleyn(&d).unwrap();
        // the boundary circle of the disk traversed along its internal half
        let q = q_of_cycle(&d, &sols[0], &[1]).unwrap();
        assert_eq!(q as usize, (1 + 1) % 2);

        let g = crossed_handle();
        let sols = solve_kasteleyn(&g).unwrap();
        for k in &sols {
            let q = q_of_cycle(&g, k, &[0, 2, 5, 8, 11]).unwrap();
            assert_eq!(q as usize, (1 + 1) % 2, "k_b + 1 for one marked point");
        }
    }

    #[test]
    fn face_loops_have_weight_zero() {
        for g in [disk(), annulus(), crossed_handle()] {
            let sols = solve_kasteleyn(&g).unwrap();
            for face in g.internal_faces() {
                for k in &sols {
                    assert_eq!(q_of_cycle(&g, k, &face).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn open_path_weight_alternates_under_reversal() {
        let g = crossed_handle();
        let sols = solve_kasteleyn(&g).unwrap();
        // a bridge from the boundary edge at A through band f to C's edge
        let path = vec![2, 7, 11];
        for k in &sols {
            let q = q_of_path(&g, k, &path).unwrap();
            let rev = reverse_path(&g, &path);
            let qr = q_of_path(&g, k, &rev).unwrap();
            assert_eq!((q + qr) % 2, 1);
        }
    }

    #[test]
    fn backtracking_rejected() {
        let g = crossed_handle();
        let sols = solve_kasteleyn(&g).unwrap();
        let bad = vec![4, 10];
        assert!(matches!(
            q_of_cycle(&g, &sols[0], &bad),
            Err(PathError::Backtracks(_))
        ));
    }

    #[test]
    fn quadratic_relation_on_crossed_handle() {
        // alpha runs through one band, beta through the other; they cross
        // once, and the combined loop represents alpha + beta.
        let g = crossed_handle();
        let sols = solve_kasteleyn(&g).unwrap();
        assert_eq!(sols.len(), 4); // 2^g classes with no internal vertices
        let alpha = vec![10, 2, 5];
        let beta = vec![7, 12, 9];
        let gamma = vec![10, 2, 7, 12];
        for k in &sols {
            let qa = q_of_cycle(&g, k, &alpha).unwrap();
            let qb = q_of_cycle(&g, k, &beta).unwrap();
            let qg = q_of_cycle(&g, k, &gamma).unwrap();
            assert_eq!(qg, (qa + qb + 1) % 2, "pairing <alpha,beta> = 1");
        }
    }

    #[test]
    fn quadratic_relation_disjoint_cycles() {
        // annulus: the face loop represents the sum of the two boundary
        // circles, which do not intersect
        let g = annulus();
        let sols = solve_kasteleyn(&g).unwrap();
        for k in &sols {
            let q1 = q_of_cycle(&g, k, &[1]).unwrap();
            let q2 = q_of_cycle(&g, k, &[4]).unwrap();
            let qsum = q_of_cycle(&g, k, &[1, 2, 4, 5]).unwrap();
            assert_eq!(qsum, (q1 + q2) % 2);
        }
    }

    #[test]
    fn ghost_has_unit_spin_constant() {
        let g = openribbon_ghost();
        let sols = solve_kasteleyn(&g).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(c_spin(&g).unwrap(), 1);
        assert_eq!(expected_c_spin(&g), 1);
    }

    fn openribbon_ghost() -> OpenTrivalentGraph {
        let h = HalfEdgeStructure::new(vec![1, 0, 3, 2, 5, 4], vec![3, 4, 5, 0, 1, 2]).unwrap();
        OpenTrivalentGraph::new_ghost(
            h,
            &[1, 3, 5],
            BTreeMap::from([(0, 1), (1, 2), (2, 3)]),
        )
        .unwrap()
    }

    #[test]
    fn crossed_handle_c_spin() {
        let g = crossed_handle();
        // odd graph of doubled genus 2 with one boundary: c_spin = 2^((2+1-1)/2) = 2
        assert_eq!(c_spin(&g).unwrap(), 2);
        assert_eq!(expected_c_spin(&g), 2);
        let r = report(&g).unwrap();
        assert!(r.matches);
        assert_eq!(r.classes, 4);
    }
}
