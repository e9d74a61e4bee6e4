//! Half-edge (rotation system) representation of closed and open ribbon
//! graphs.
//!
//! A graph is a pair of permutations on half-edge ids: `rotation` whose
//! cycles are the vertices (counterclockwise order of half-edges around
//! each vertex) and `pairing`, a fixed-point-free involution whose orbits
//! are the edges. Faces and boundary circles are cycles of the derived
//! permutation `rotation⁻¹ ∘ pairing`. Open graphs additionally carry the
//! set of boundary halves: for every boundary edge, the half oriented
//! against the induced boundary orientation.
//!
//! Vertices and faces are always derived from the permutations, never
//! stored.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RibbonError {
    #[error("permutation tables must have equal length {0} != {1}")]
    LengthMismatch(usize, usize),
    #[error("half-edge count must be even, got {0}")]
    OddHalfCount(usize),
    #[error("sigma0 is not a permutation")]
    NotPermutation,
    #[error("sigma1 must be a fixed-point-free involution")]
    BadInvolution,
    #[error("graph is not connected")]
    Disconnected,
    #[error("boundary half {0} out of range")]
    BoundaryOutOfRange(usize),
    #[error("both halves of an edge marked as boundary")]
    BoundaryPair,
    #[error("boundary set is not closed under the face permutation")]
    BoundaryNotFaceClosed,
    #[error("vertex {0} has unsupported degree {1}")]
    BadDegree(usize, usize),
    #[error("vertex {0} mixes boundary and internal halves incorrectly")]
    BadVertexPattern(usize),
    #[error("ghost component must be a single 3-marked circle without faces")]
    BadGhost,
    #[error("face labels must be distinct positive labels on faces")]
    BadFaceLabels,
    #[error("point labels must be distinct positive labels on marked vertices")]
    BadPointLabels,
    #[error("negative surface genus: invalid gluing")]
    NegativeGenus,
    #[error("marked vertex expected at vertex {0}")]
    NotMarked(usize),
}

/// Permutation pair encoding a ribbon graph. `rotation[h]` is the next
/// half-edge counterclockwise at the vertex of `h`; `pairing[h]` is the
/// other half of the edge of `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdgeStructure {
    pub rotation: Vec<usize>,
    pub pairing: Vec<usize>,
}

impl HalfEdgeStructure {
    pub fn new(rotation: Vec<usize>, pairing: Vec<usize>) -> Result<Self, RibbonError> {
        let h = HalfEdgeStructure { rotation, pairing };
        h.validate()?;
        Ok(h)
    }

    pub fn n_half(&self) -> usize {
        self.rotation.len()
    }

    pub fn validate(&self) -> Result<(), RibbonError> {
        let n = self.rotation.len();
        if self.pairing.len() != n {
            return Err(RibbonError::LengthMismatch(n, self.pairing.len()));
        }
        if n % 2 != 0 {
            return Err(RibbonError::OddHalfCount(n));
        }
        let mut seen = vec![false; n];
        for &x in &self.rotation {
            if x >= n || seen[x] {
                return Err(RibbonError::NotPermutation);
            }
            seen[x] = true;
        }
        for (i, &x) in self.pairing.iter().enumerate() {
            if x >= n || x == i || self.pairing[x] != i {
                return Err(RibbonError::BadInvolution);
            }
        }
        Ok(())
    }

    pub fn rotation_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.n_half()];
        for (i, &x) in self.rotation.iter().enumerate() {
            inv[x] = i;
        }
        inv
    }

    /// Cycles of a permutation table, each cycle starting at its smallest
    /// element, cycles sorted by that element.
    pub fn cycles_of(table: &[usize]) -> Vec<Vec<usize>> {
        let n = table.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = table[x];
            }
            out.push(cyc);
        }
        out
    }

    /// Table of the face permutation rotation⁻¹ ∘ pairing.
    pub fn face_table(&self) -> Vec<usize> {
        let inv = self.rotation_inverse();
        (0..self.n_half()).map(|h| inv[self.pairing[h]]).collect()
    }

    /// All cycles of the face permutation (faces and, for open graphs,
    /// boundary circles), in cyclic order, sorted by smallest half-edge.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        Self::cycles_of(&self.face_table())
    }

    /// Vertices as rotation cycles, sorted by smallest half-edge.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        Self::cycles_of(&self.rotation)
    }

    pub fn edge_count(&self) -> usize {
        self.n_half() / 2
    }

    /// Edge representatives: the smaller half of each pair, sorted.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.n_half())
            .filter(|&h| h < self.pairing[h])
            .collect()
    }

    /// Joint transitivity of rotation and pairing.
    pub fn is_connected(&self) -> bool {
        let n = self.n_half();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in [self.rotation[x], self.pairing[x]] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }
}

/// Classification of a vertex of an open trivalent graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// Three internal halves.
    Internal,
    /// Degree 3 on the boundary: one internal half plus one half of each
    /// adjacent boundary edge.
    BoundaryUnmarked,
    /// Degree 2, both halves on boundary edges: a boundary marked point.
    Marked,
}

/// A smooth trivalent open ribbon graph. Closed trivalent graphs are the
/// empty-boundary case; trivalent ghosts are marked circles whose
/// complementary disk is not a face.
///
/// Face labels and point labels are 1-based and need only be distinct;
/// catalogs use the contiguous ranges 1..=l and 1..=k. A circle graph with
/// unlabeled complement is ambiguous between a ghost and a one-face graph,
/// so ghostness is part of the data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenTrivalentGraph {
    halfedges: HalfEdgeStructure,
    /// is_boundary[h]: h points against the induced boundary orientation
    is_boundary: Vec<bool>,
    ghost: bool,
    /// face index (position among internal face cycles) -> label
    face_labels: BTreeMap<usize, usize>,
    /// marked vertex index (position in `vertices()`) -> label
    point_labels: BTreeMap<usize, usize>,
}

/// Counts and genus data of an open or closed graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    /// Doubled genus 2·surface_genus + boundaries - 1 for graphs with
    /// boundary; for closed graphs this is the surface genus itself.
    pub genus: usize,
    pub surface_genus: usize,
    pub boundaries: usize,
    pub internal_vertices: usize,
    pub faces: usize,
    pub boundary_points: usize,
    pub edges: usize,
}

impl OpenTrivalentGraph {
    pub fn new(
        halfedges: HalfEdgeStructure,
        boundary_halves: &[usize],
        face_labels: BTreeMap<usize, usize>,
        point_labels: BTreeMap<usize, usize>,
    ) -> Result<Self, RibbonError> {
        Self::build(halfedges, boundary_halves, false, face_labels, point_labels)
    }

    /// A trivalent ghost: the marked circle itself, no faces.
    pub fn new_ghost(
        halfedges: HalfEdgeStructure,
        boundary_halves: &[usize],
        point_labels: BTreeMap<usize, usize>,
    ) -> Result<Self, RibbonError> {
        Self::build(halfedges, boundary_halves, true, BTreeMap::new(), point_labels)
    }

    fn build(
        halfedges: HalfEdgeStructure,
        boundary_halves: &[usize],
        ghost: bool,
        face_labels: BTreeMap<usize, usize>,
        point_labels: BTreeMap<usize, usize>,
    ) -> Result<Self, RibbonError> {
        halfedges.validate()?;
        if !halfedges.is_connected() {
            return Err(RibbonError::Disconnected);
        }
        let n = halfedges.n_half();
        let mut is_boundary = vec![false; n];
        for &b in boundary_halves {
            if b >= n {
                return Err(RibbonError::BoundaryOutOfRange(b));
            }
            is_boundary[b] = true;
        }
        let g = OpenTrivalentGraph {
            halfedges,
            is_boundary,
            ghost,
            face_labels,
            point_labels,
        };
        g.check_structure()?;
        Ok(g)
    }

    pub fn halfedges(&self) -> &HalfEdgeStructure {
        &self.halfedges
    }

    pub fn n_half(&self) -> usize {
        self.halfedges.n_half()
    }

    pub fn is_boundary_half(&self, h: usize) -> bool {
        self.is_boundary[h]
    }

    pub fn boundary_halves(&self) -> Vec<usize> {
        (0..self.n_half()).filter(|&h| self.is_boundary[h]).collect()
    }

    /// h lies on a boundary edge (either side).
    pub fn on_boundary_edge(&self, h: usize) -> bool {
        self.is_boundary[h] || self.is_boundary[self.halfedges.pairing[h]]
    }

    pub fn is_closed(&self) -> bool {
        self.is_boundary.iter().all(|&b| !b)
    }

    pub fn is_ghost(&self) -> bool {
        self.ghost
    }

    pub fn has_internal_edges(&self) -> bool {
        (0..self.n_half()).any(|h| !self.on_boundary_edge(h))
    }

    pub fn face_labels(&self) -> &BTreeMap<usize, usize> {
        &self.face_labels
    }

    pub fn point_labels(&self) -> &BTreeMap<usize, usize> {
        &self.point_labels
    }

    /// Internal faces: cycles of the face permutation avoiding boundary
    /// halves. A ghost has none.
    pub fn internal_faces(&self) -> Vec<Vec<usize>> {
        if self.ghost {
            return Vec::new();
        }
        self.halfedges
            .faces()
            .into_iter()
            .filter(|c| !self.is_boundary[c[0]])
            .collect()
    }

    /// Boundary circles as face-permutation cycles of boundary halves.
    pub fn boundary_cycles(&self) -> Vec<Vec<usize>> {
        self.halfedges
            .faces()
            .into_iter()
            .filter(|c| self.is_boundary[c[0]])
            .collect()
    }

    pub fn vertex_kinds(&self) -> Vec<VertexKind> {
        self.halfedges
            .vertices()
            .iter()
            .map(|v| {
                if v.len() == 2 {
                    VertexKind::Marked
                } else if v.iter().all(|&h| !self.on_boundary_edge(h)) {
                    VertexKind::Internal
                } else {
                    VertexKind::BoundaryUnmarked
                }
            })
            .collect()
    }

    /// Marked-vertex indices (positions in `vertices()`), sorted.
    pub fn marked_vertices(&self) -> Vec<usize> {
        self.vertex_kinds()
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == VertexKind::Marked)
            .map(|(i, _)| i)
            .collect()
    }

    /// The face label adjacent to a half-edge that is not a boundary half.
    pub fn face_label_of_half(&self, h: usize) -> Option<usize> {
        let faces = self.internal_faces();
        for (i, f) in faces.iter().enumerate() {
            if f.contains(&h) {
                return self.face_labels.get(&i).copied();
            }
        }
        None
    }

    fn check_structure(&self) -> Result<(), RibbonError> {
        let h = &self.halfedges;
        let n = h.n_half();
        for x in 0..n {
            if self.is_boundary[x] && self.is_boundary[h.pairing[x]] {
                return Err(RibbonError::BoundaryPair);
            }
        }
        let ft = h.face_table();
        for x in 0..n {
            if self.is_boundary[x] != self.is_boundary[ft[x]] {
                return Err(RibbonError::BoundaryNotFaceClosed);
            }
        }
        let vertices = h.vertices();
        for (vi, v) in vertices.iter().enumerate() {
            match v.len() {
                2 => {
                    let b: Vec<bool> = v.iter().map(|&x| self.is_boundary[x]).collect();
                    let w: Vec<bool> = v
                        .iter()
                        .map(|&x| self.is_boundary[h.pairing[x]])
                        .collect();
                    let ok = (b[0] && w[1] && !b[1] && !w[0])
                        || (b[1] && w[0] && !b[0] && !w[1]);
                    if !ok {
                        return Err(RibbonError::BadVertexPattern(vi));
                    }
                }
                3 => {
                    let on_bd: Vec<bool> = v.iter().map(|&x| self.on_boundary_edge(x)).collect();
                    let bd_count = on_bd.iter().filter(|&&b| b).count();
                    match bd_count {
                        0 => {}
                        2 => {
                            // rotation runs with-orientation half -> internal
                            // half -> against-orientation half
                            let w = v
                                .iter()
                                .position(|&x| !self.on_boundary_edge(x))
                                .ok_or(RibbonError::BadVertexPattern(vi))?;
                            let internal = v[w];
                            let after = h.rotation[internal];
                            let before = h.rotation[after];
                            let ok = self.is_boundary[after]
                                && !self.is_boundary[before]
                                && self.is_boundary[h.pairing[before]];
                            if !ok {
                                return Err(RibbonError::BadVertexPattern(vi));
                            }
                        }
                        _ => return Err(RibbonError::BadVertexPattern(vi)),
                    }
                }
                d => return Err(RibbonError::BadDegree(vi, d)),
            }
        }
        if self.ghost {
            let vk = self.vertex_kinds();
            if self.has_internal_edges()
                || vk.len() != 3
                || vk.iter().any(|k| *k != VertexKind::Marked)
                || self.boundary_cycles().len() != 1
                || !self.face_labels.is_empty()
            {
                return Err(RibbonError::BadGhost);
            }
        } else {
            let nfaces = self.internal_faces().len();
            let mut labels = BTreeSet::new();
            for (&i, &l) in &self.face_labels {
                if i >= nfaces || l == 0 || !labels.insert(l) {
                    return Err(RibbonError::BadFaceLabels);
                }
            }
        }
        // repeated point labels are allowed: assemblies mark interchangeable
        // points with a shared tag; catalogs always use bijections
        let marked: BTreeSet<usize> = self.marked_vertices().into_iter().collect();
        for (&v, &l) in &self.point_labels {
            if !marked.contains(&v) {
                return Err(RibbonError::NotMarked(v));
            }
            if l == 0 {
                return Err(RibbonError::BadPointLabels);
            }
        }
        self.stats()?;
        Ok(())
    }

    /// Counts and genus, rejecting gluings with negative surface genus.
    pub fn stats(&self) -> Result<GraphStats, RibbonError> {
        let h = &self.halfedges;
        let vertices = h.vertices();
        let edges = h.edge_count();
        let marked = self.marked_vertices().len();
        let internal_vertices = self
            .vertex_kinds()
            .iter()
            .filter(|k| **k == VertexKind::Internal)
            .count();
        if self.ghost {
            return Ok(GraphStats {
                genus: 0,
                surface_genus: 0,
                boundaries: 1,
                internal_vertices: 0,
                faces: 0,
                boundary_points: marked,
                edges,
            });
        }
        let faces = self.internal_faces().len();
        let boundaries = self.boundary_cycles().len();
        let v = vertices.len() as i64;
        let e = edges as i64;
        let l = faces as i64;
        let b = boundaries as i64;
        // V - E + l = 2 - 2 g_s - b
        let two_gs = 2 - b - (v - e + l);
        if two_gs < 0 || two_gs % 2 != 0 {
            return Err(RibbonError::NegativeGenus);
        }
        let gs = (two_gs / 2) as usize;
        let genus = if boundaries > 0 {
            2 * gs + boundaries - 1
        } else {
            gs
        };
        Ok(GraphStats {
            genus,
            surface_genus: gs,
            boundaries,
            internal_vertices,
            faces,
            boundary_points: marked,
            edges,
        })
    }

    /// Number of marked points on each boundary circle, in `boundary_cycles`
    /// order.
    pub fn points_per_boundary(&self) -> Vec<usize> {
        let h = &self.halfedges;
        let vertices = h.vertices();
        let mut vertex_of = vec![0usize; self.n_half()];
        for (vi, v) in vertices.iter().enumerate() {
            for &x in v {
                vertex_of[x] = vi;
            }
        }
        let kinds = self.vertex_kinds();
        self.boundary_cycles()
            .iter()
            .map(|cyc| {
                cyc.iter()
                    .filter(|&&x| kinds[vertex_of[x]] == VertexKind::Marked)
                    .count()
            })
            .collect()
    }

    /// Every boundary circle carries an odd number of marked points.
    pub fn is_odd(&self) -> bool {
        self.points_per_boundary().iter().all(|&c| c % 2 == 1)
    }

    // ----- canonical forms -------------------------------------------------

    fn bfs_relabel(&self, root: usize) -> Vec<usize> {
        let h = &self.halfedges;
        let n = h.n_half();
        let mut new_of = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        new_of[root] = 0;
        order.push(root);
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for y in [h.rotation[x], h.pairing[x]] {
                if new_of[y] == usize::MAX {
                    new_of[y] = order.len();
                    order.push(y);
                }
            }
            i += 1;
        }
        new_of
    }

    fn code_under(&self, new_of: &[usize], with_labels: bool) -> Vec<u64> {
        let h = &self.halfedges;
        let n = h.n_half();
        let mut old_of = vec![0usize; n];
        for (old, &new) in new_of.iter().enumerate() {
            old_of[new] = old;
        }
        let mut code = Vec::with_capacity(4 * n + 2);
        code.push(n as u64);
        code.push(self.ghost as u64);
        for j in 0..n {
            code.push(new_of[h.rotation[old_of[j]]] as u64);
        }
        for j in 0..n {
            code.push(new_of[h.pairing[old_of[j]]] as u64);
        }
        for j in 0..n {
            code.push(self.is_boundary[old_of[j]] as u64);
        }
        if with_labels {
            // labels keyed by the minimal relabeled half of their cycle
            let faces = self.internal_faces();
            let mut by_min: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, f) in faces.iter().enumerate() {
                let m = f.iter().map(|&x| new_of[x]).min().unwrap();
                by_min.insert(m, *self.face_labels.get(&i).unwrap_or(&0));
            }
            code.push(u64::MAX);
            for (m, l) in by_min {
                code.push(m as u64);
                code.push(l as u64);
            }
            let vertices = h.vertices();
            let mut vmin: BTreeMap<usize, usize> = BTreeMap::new();
            for (vi, v) in vertices.iter().enumerate() {
                let m = v.iter().map(|&x| new_of[x]).min().unwrap();
                vmin.insert(m, self.point_labels.get(&vi).copied().unwrap_or(0));
            }
            code.push(u64::MAX);
            for (m, l) in vmin {
                code.push(m as u64);
                code.push(l as u64);
            }
        }
        code
    }

    fn canonical_code_and_roots(&self, with_labels: bool) -> (Vec<u64>, Vec<Vec<usize>>) {
        let n = self.n_half();
        if n == 0 {
            return (vec![0], vec![vec![]]);
        }
        let mut best: Option<Vec<u64>> = None;
        let mut best_maps: Vec<Vec<usize>> = Vec::new();
        for root in 0..n {
            let map = self.bfs_relabel(root);
            let code = self.code_under(&map, with_labels);
            match &mut best {
                None => {
                    best = Some(code);
                    best_maps = vec![map];
                }
                Some(b) => {
                    if code < *b {
                        *b = code;
                        best_maps = vec![map];
                    } else if code == *b {
                        best_maps.push(map);
                    }
                }
            }
        }
        (best.unwrap(), best_maps)
    }

    /// Canonical code as bytes, with the relabeling that realizes it.
    /// Two graphs are isomorphic (respecting labels and boundary
    /// orientation) exactly when their codes agree.
    pub fn canonical_form(&self) -> (Vec<u8>, Vec<usize>) {
        let (code, maps) = self.canonical_code_and_roots(true);
        let bytes = code.iter().flat_map(|x| x.to_be_bytes()).collect();
        (bytes, maps.into_iter().next().unwrap())
    }

    /// Canonical code ignoring labels (structure plus boundary orientation).
    pub fn canonical_code_unlabeled(&self) -> Vec<u64> {
        self.canonical_code_and_roots(false).0
    }

    /// All relabelings onto the canonical unlabeled frame, one per
    /// structural automorphism. Decorations are ignored; boundary
    /// orientation is preserved.
    pub fn canonical_relabelings_unlabeled(&self) -> Vec<Vec<usize>> {
        self.canonical_code_and_roots(false).1
    }

    /// All label- and structure-preserving automorphisms, as half-edge
    /// permutations (old id -> old id). The identity is always present and
    /// the result is closed under composition.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.automorphism_maps(true)
    }

    /// Automorphisms ignoring face and point labels (boundary orientation is
    /// still preserved).
    pub fn automorphisms_unlabeled(&self) -> Vec<Vec<usize>> {
        self.automorphism_maps(false)
    }

    fn automorphism_maps(&self, with_labels: bool) -> Vec<Vec<usize>> {
        let n = self.n_half();
        if n == 0 {
            return vec![vec![]];
        }
        let (_, maps) = self.canonical_code_and_roots(with_labels);
        let base = &maps[0];
        let mut autos: Vec<Vec<usize>> = maps
            .iter()
            .map(|m| {
                let mut old_of_m = vec![0usize; n];
                for (old, &new) in m.iter().enumerate() {
                    old_of_m[new] = old;
                }
                // phi = m^{-1} ∘ base
                (0..n).map(|x| old_of_m[base[x]]).collect()
            })
            .collect();
        autos.sort();
        autos
    }

    /// Relabels half-edges by an arbitrary bijection (old id -> new id),
    /// carrying the decorations along.
    pub fn relabeled(&self, map: &[usize]) -> OpenTrivalentGraph {
        let h = &self.halfedges;
        let n = h.n_half();
        let mut rotation = vec![0; n];
        let mut pairing = vec![0; n];
        let mut is_boundary = vec![false; n];
        for old in 0..n {
            rotation[map[old]] = map[h.rotation[old]];
            pairing[map[old]] = map[h.pairing[old]];
            is_boundary[map[old]] = self.is_boundary[old];
        }
        let new_h = HalfEdgeStructure { rotation, pairing };
        let old_faces = self.internal_faces();
        let skeleton = OpenTrivalentGraph {
            halfedges: new_h.clone(),
            is_boundary: is_boundary.clone(),
            ghost: self.ghost,
            face_labels: BTreeMap::new(),
            point_labels: BTreeMap::new(),
        };
        let new_faces = skeleton.internal_faces();
        let mut face_labels = BTreeMap::new();
        for (i, f) in old_faces.iter().enumerate() {
            if let Some(&l) = self.face_labels.get(&i) {
                let target = map[f[0]];
                let ni = new_faces
                    .iter()
                    .position(|nf| nf.contains(&target))
                    .expect("face image exists");
                face_labels.insert(ni, l);
            }
        }
        let old_vertices = h.vertices();
        let new_vertices = new_h.vertices();
        let mut point_labels = BTreeMap::new();
        for (vi, v) in old_vertices.iter().enumerate() {
            if let Some(&l) = self.point_labels.get(&vi) {
                let target = map[v[0]];
                let ni = new_vertices
                    .iter()
                    .position(|nv| nv.contains(&target))
                    .expect("vertex image exists");
                point_labels.insert(ni, l);
            }
        }
        OpenTrivalentGraph {
            halfedges: new_h,
            is_boundary,
            ghost: self.ghost,
            face_labels,
            point_labels,
        }
    }

    /// Replaces the label decorations wholesale (validated).
    pub fn with_labels(
        &self,
        face_labels: BTreeMap<usize, usize>,
        point_labels: BTreeMap<usize, usize>,
    ) -> Result<OpenTrivalentGraph, RibbonError> {
        let g = OpenTrivalentGraph {
            halfedges: self.halfedges.clone(),
            is_boundary: self.is_boundary.clone(),
            ghost: self.ghost,
            face_labels,
            point_labels,
        };
        g.check_structure()?;
        Ok(g)
    }
}

/// Valid boundary-half assignments for a raw permutation pair, as sorted
/// half lists. Structures with a trivalent boundary vertex admit at most
/// one; pure circles admit two (the two surface sides).
pub fn boundary_assignments(h: &HalfEdgeStructure) -> Vec<Vec<usize>> {
    let faces = h.faces();
    let ncyc = faces.len();
    if ncyc > 16 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << ncyc) {
        let mut bd = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            if mask & (1 << i) != 0 {
                bd.extend_from_slice(f);
            }
        }
        bd.sort_unstable();
        if OpenTrivalentGraph::new(h.clone(), &bd, BTreeMap::new(), BTreeMap::new()).is_ok() {
            out.push(bd);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Planar theta graph: two vertices joined by three parallel edges.
    fn planar_theta() -> HalfEdgeStructure {
        HalfEdgeStructure::new(vec![1, 2, 0, 5, 3, 4], vec![3, 4, 5, 0, 1, 2]).unwrap()
    }

    /// Boundary-loop disk: one marked point, one loop edge, one face.
    fn disk_graph() -> OpenTrivalentGraph {
        let h = HalfEdgeStructure::new(vec![1, 0], vec![1, 0]).unwrap();
        OpenTrivalentGraph::new(
            h,
            &[0],
            BTreeMap::from([(0usize, 1usize)]),
            BTreeMap::from([(0usize, 1usize)]),
        )
        .expect("disk graph valid")
    }

    fn ghost(order: [usize; 3]) -> OpenTrivalentGraph {
        // circle with three marked vertices; half 2i runs with the
        // boundary orientation, 2i+1 against it
        let rotation = vec![1, 0, 3, 2, 5, 4];
        let pairing = vec![3, 4, 5, 0, 1, 2];
        let h = HalfEdgeStructure::new(rotation, pairing).unwrap();
        let point_labels = BTreeMap::from([(0, order[0]), (1, order[1]), (2, order[2])]);
        OpenTrivalentGraph::new_ghost(h, &[1, 3, 5], point_labels).expect("ghost valid")
    }

    #[test]
    fn theta_has_three_faces() {
        assert_eq!(planar_theta().faces().len(), 3);
    }

    #[test]
    fn one_vertex_loop_face_count_follows_euler() {
        // A single loop on one vertex with rotation a 2-cycle gives two
        // faces: V - E + F = 1 - 1 + 2 = 2, the sphere.
        let h = HalfEdgeStructure::new(vec![1, 0], vec![1, 0]).unwrap();
        assert_eq!(h.faces().len(), 2);
    }

    #[test]
    fn disk_stats() {
        let d = disk_graph();
        assert_eq!(d.internal_faces().len(), 1);
        assert_eq!(d.internal_faces()[0].len(), 1);
        let s = d.stats().unwrap();
        assert_eq!(
            (s.genus, s.boundaries, s.internal_vertices, s.boundary_points),
            (0, 1, 0, 1)
        );
    }

    #[test]
    fn ghost_structure() {
        let g = ghost([1, 2, 3]);
        assert!(g.is_ghost());
        let s = g.stats().unwrap();
        assert_eq!((s.genus, s.boundaries, s.faces, s.boundary_points), (0, 1, 0, 3));
        assert_eq!(g.automorphisms().len(), 1);
        assert_eq!(g.automorphisms_unlabeled().len(), 3);
    }

    #[test]
    fn ghost_cyclic_orders_differ() {
        let a = ghost([1, 2, 3]);
        let b = ghost([1, 3, 2]);
        assert_ne!(a.canonical_form().0, b.canonical_form().0);
    }

    #[test]
    fn mirror_of_labeled_circle_differs() {
        // flipping which side of the circle carries the surface reverses
        // the boundary orientation, hence the cyclic order of the labels
        let g = ghost([1, 2, 3]);
        let mirrored = OpenTrivalentGraph::new_ghost(
            g.halfedges().clone(),
            &[0, 2, 4],
            g.point_labels().clone(),
        )
        .unwrap();
        assert_ne!(g.canonical_form().0, mirrored.canonical_form().0);
        // and it agrees with the other cyclic order up to isomorphism
        assert_eq!(mirrored.canonical_form().0, ghost([1, 3, 2]).canonical_form().0);
    }

    #[test]
    fn canonical_form_invariant_under_relabeling() {
        let d = ghost([1, 2, 3]);
        let map: Vec<usize> = (0..6).map(|i| (i + 2) % 6).collect();
        let r = d.relabeled(&map);
        assert_eq!(d.canonical_form().0, r.canonical_form().0);
    }

    #[test]
    fn theta_labeled_automorphisms_divide_two() {
        let g0 = OpenTrivalentGraph::new(planar_theta(), &[], BTreeMap::new(), BTreeMap::new())
            .unwrap();
        assert_eq!(g0.internal_faces().len(), 3);
        let labels = BTreeMap::from([(0, 1), (1, 2), (2, 3)]);
        let g = g0.with_labels(labels, BTreeMap::new()).unwrap();
        let a = g.automorphisms().len();
        assert!(a == 1 || a == 2, "order {a} should divide 2");
        assert_eq!(g.automorphisms_unlabeled().len(), 6);
    }

    #[test]
    fn automorphisms_form_a_group() {
        let g0 = OpenTrivalentGraph::new(planar_theta(), &[], BTreeMap::new(), BTreeMap::new())
            .unwrap();
        let autos = g0.automorphisms_unlabeled();
        let set: BTreeSet<Vec<usize>> = autos.iter().cloned().collect();
        assert!(set.contains(&(0..6).collect::<Vec<_>>()));
        for a in &autos {
            for b in &autos {
                let comp: Vec<usize> = (0..6).map(|x| a[b[x]]).collect();
                assert!(set.contains(&comp));
            }
        }
    }

    #[test]
    fn boundary_assignments_for_disk() {
        let d = disk_graph();
        let assignments = boundary_assignments(d.halfedges());
        // the two surface sides of the circle
        assert_eq!(assignments.len(), 2);
        assert!(assignments.contains(&vec![0]));
    }

    proptest! {
        #[test]
        fn canonical_form_stable_under_random_relabeling(seed in 0u64..512) {
            let g = ghost([1, 2, 3]);
            // a cheap deterministic shuffle of 0..6
            let mut map: Vec<usize> = (0..6).collect();
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            for i in (1..6).rev() {
                s ^= s >> 33;
                s = s.wrapping_mul(0xff51afd7ed558ccd);
                let j = (s % (i as u64 + 1)) as usize;
                map.swap(i, j);
            }
            let r = g.relabeled(&map);
            prop_assert_eq!(g.canonical_form().0, r.canonical_form().0);
        }
    }
}
