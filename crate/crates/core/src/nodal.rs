//! Critical nodal ribbon graphs: tuples of smooth trivalent components
//! glued along ordered node pairs.
//!
//! Every node has a legal side (a boundary marked point of some component)
//! and an illegal side (a position on a boundary edge of a non-ghost
//! component). Boundary edges record their illegal sides as an ordered
//! list; the order along the edge matters and isomorphisms must preserve
//! it exactly. Every boundary circle of every component must carry an odd
//! number of points, marked or legal.

use crate::enumerate::{enumerate_open_trivalent, odd_subset, EnumError, EnumLimits, GraphCatalog};
use crate::ribbon::{HalfEdgeStructure, OpenTrivalentGraph, VertexKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NodalError {
    #[error("point {1} of component {0} has no role")]
    MissingRole(usize, usize),
    #[error("boundary labels must biject onto 1..=k")]
    BadPointLabels,
    #[error("face labels must biject onto 1..=l")]
    BadFaceLabels,
    #[error("node id {0} duplicated")]
    DuplicateNodeId(usize),
    #[error("node id {0} lacks a matching legal side or slot")]
    UnmatchedNodeId(usize),
    #[error("ghost component {0} cannot host illegal sides")]
    GhostSlot(usize),
    #[error("slot key {1} of component {0} is not a boundary edge")]
    SlotEdgeInvalid(usize, usize),
    #[error("boundary circle with an even number of points in component {0}")]
    EvenBoundary(usize),
    #[error("component incidence graph is disconnected")]
    Disconnected,
    #[error("negative total genus")]
    NegativeGenus,
    #[error("component {0} is invalid: {1}")]
    BadComponent(usize, String),
}

/// Role of a boundary marked point inside a nodal graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointRole {
    /// Carries the global boundary label j (1-based).
    Labeled(usize),
    /// Legal side of the node with the given id.
    LegalNode(usize),
}

/// One smooth component with its roles and illegal-side lists.
#[derive(Clone, Debug)]
pub struct NodalComponent {
    /// Face labels are global; point labels stay empty, roles replace them.
    pub graph: OpenTrivalentGraph,
    /// marked-vertex index -> role
    pub roles: BTreeMap<usize, PointRole>,
    /// boundary-edge representative (smaller half) -> ordered node ids,
    /// in boundary order along the edge
    pub slots: BTreeMap<usize, Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct NodalGraph {
    pub components: Vec<NodalComponent>,
}

/// Validated totals of a nodal graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalStats {
    pub genus: usize,
    pub boundary_points: usize,
    pub faces: usize,
    pub nodes: usize,
    pub components: usize,
}

impl NodalGraph {
    /// Total node count.
    pub fn node_count(&self) -> usize {
        self.components
            .iter()
            .flat_map(|c| c.slots.values())
            .map(|v| v.len())
            .sum()
    }

    /// Checks every structural invariant and returns the totals.
    pub fn validate(&self) -> Result<NodalStats, NodalError> {
        let mut legal_ids: BTreeMap<usize, usize> = BTreeMap::new(); // id -> component
        let mut slot_ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut labels = BTreeSet::new();
        let mut face_labels = BTreeSet::new();
        let mut genus_sum = 0usize;
        for (ci, comp) in self.components.iter().enumerate() {
            let stats = comp
                .graph
                .stats()
                .map_err(|e| NodalError::BadComponent(ci, e.to_string()))?;
            genus_sum += stats.genus;
            for (i, _) in comp.graph.internal_faces().iter().enumerate() {
                let l = comp
                    .graph
                    .face_labels()
                    .get(&i)
                    .copied()
                    .ok_or(NodalError::BadFaceLabels)?;
                if !face_labels.insert(l) {
                    return Err(NodalError::BadFaceLabels);
                }
            }
            for v in comp.graph.marked_vertices() {
                match comp.roles.get(&v) {
                    None => return Err(NodalError::MissingRole(ci, v)),
                    Some(PointRole::Labeled(j)) => {
                        if *j == 0 || !labels.insert(*j) {
                            return Err(NodalError::BadPointLabels);
                        }
                    }
                    Some(PointRole::LegalNode(id)) => {
                        if legal_ids.insert(*id, ci).is_some() {
                            return Err(NodalError::DuplicateNodeId(*id));
                        }
                    }
                }
            }
            if comp.roles.len() != comp.graph.marked_vertices().len() {
                return Err(NodalError::MissingRole(ci, usize::MAX));
            }
            let bd_edges: BTreeSet<usize> = comp
                .graph
                .boundary_halves()
                .iter()
                .map(|&b| b.min(comp.graph.halfedges().pairing[b]))
                .collect();
            for (&e, ids) in &comp.slots {
                if ids.is_empty() {
                    continue;
                }
                if comp.graph.is_ghost() {
                    return Err(NodalError::GhostSlot(ci));
                }
                if !bd_edges.contains(&e) {
                    return Err(NodalError::SlotEdgeInvalid(ci, e));
                }
                for &id in ids {
                    if slot_ids.insert(id, ci).is_some() {
                        return Err(NodalError::DuplicateNodeId(id));
                    }
                }
            }
            if !comp.graph.is_odd() {
                return Err(NodalError::EvenBoundary(ci));
            }
        }
        for (&id, _) in &legal_ids {
            if !slot_ids.contains_key(&id) {
                return Err(NodalError::UnmatchedNodeId(id));
            }
        }
        for (&id, _) in &slot_ids {
            if !legal_ids.contains_key(&id) {
                return Err(NodalError::UnmatchedNodeId(id));
            }
        }
        // labels must be exactly 1..=k and faces 1..=l
        let k = labels.len();
        if let Some(&mx) = labels.iter().max() {
            if mx != k {
                return Err(NodalError::BadPointLabels);
            }
        }
        let l = face_labels.len();
        if let Some(&mx) = face_labels.iter().max() {
            if mx != l {
                return Err(NodalError::BadFaceLabels);
            }
        }
        // connectivity of the component incidence graph
        let c = self.components.len();
        let mut parent: Vec<usize> = (0..c).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for (&id, &ci) in &legal_ids {
            let cj = slot_ids[&id];
            let (a, b) = (find(&mut parent, ci), find(&mut parent, cj));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        for x in 1..c {
            if find(&mut parent, x) != root {
                return Err(NodalError::Disconnected);
            }
        }
        let m = legal_ids.len();
        // genus of the glued surface
        let g = genus_sum as i64 + m as i64 - c as i64 + 1;
        if g < 0 {
            return Err(NodalError::NegativeGenus);
        }
        Ok(NodalStats {
            genus: g as usize,
            boundary_points: k,
            faces: l,
            nodes: m,
            components: c,
        })
    }

    /// Canonical byte code: invariant under component reordering, node-id
    /// renaming, and half-edge relabeling of each component.
    pub fn canonical_code(&self) -> Vec<u8> {
        self.code_and_aut().0
    }

    /// Order of the automorphism group (labels, roles, node pairing, and
    /// slot order all preserved; legal and illegal sides never swap).
    pub fn automorphism_count(&self) -> u64 {
        self.code_and_aut().1
    }

    fn code_and_aut(&self) -> (Vec<u8>, u64) {
        let c = self.components.len();
        // candidate relabelings per component: all maps onto the canonical
        // frame of its unlabeled structure
        let maps: Vec<Vec<Vec<usize>>> = self
            .components
            .iter()
            .map(|comp| comp.graph.canonical_relabelings_unlabeled())
            .collect();
        // components may permute only within equal structural codes
        let codes: Vec<Vec<u64>> = self
            .components
            .iter()
            .map(|comp| comp.graph.canonical_code_unlabeled())
            .collect();
        let mut best: Option<Vec<u64>> = None;
        let mut hits = 0u64;
        let mut perm: Vec<usize> = (0..c).collect();
        let mut choice = vec![0usize; c];
        fn perms_grouped(
            pos: usize,
            used: &mut Vec<bool>,
            perm: &mut Vec<usize>,
            codes: &Vec<Vec<u64>>,
            out: &mut impl FnMut(&[usize]),
        ) {
            let c = codes.len();
            if pos == c {
                out(perm);
                return;
            }
            for cand in 0..c {
                if used[cand] {
                    continue;
                }
                // only permutations matching structural codes can compete
                if codes[cand] != codes[pos] {
                    continue;
                }
                used[cand] = true;
                perm[pos] = cand;
                perms_grouped(pos + 1, used, perm, codes, out);
                used[cand] = false;
            }
        }
        let mut used = vec![false; c];
        let mut eval_perm = |perm: &[usize]| {
            // iterate all per-component map choices
            let sizes: Vec<usize> = perm.iter().map(|&ci| maps[ci].len()).collect();
            let total: usize = sizes.iter().product();
            for mut idx in 0..total {
                for (slot, &s) in sizes.iter().enumerate() {
                    choice[slot] = idx % s;
                    idx /= s;
                }
                let code = self.serialize(perm, &maps, &choice);
                match &mut best {
                    None => {
                        best = Some(code);
                        hits = 1;
                    }
                    Some(b) => {
                        if code < *b {
                            *b = code;
                            hits = 1;
                        } else if code == *b {
                            hits += 1;
                        }
                    }
                }
            }
        };
        perms_grouped(0, &mut used, &mut perm, &codes, &mut eval_perm);
        let code = best.unwrap_or_default();
        let bytes = code.iter().flat_map(|x| x.to_be_bytes()).collect();
        (bytes, hits)
    }

    fn serialize(
        &self,
        perm: &[usize],
        maps: &[Vec<Vec<usize>>],
        choice: &[usize],
    ) -> Vec<u64> {
        let mut out = Vec::new();
        let mut rename: BTreeMap<usize, u64> = BTreeMap::new();
        let mut next_name = 0u64;
        let mut name = |id: usize, rename: &mut BTreeMap<usize, u64>| -> u64 {
            *rename.entry(id).or_insert_with(|| {
                let n = next_name;
                next_name += 1;
                n
            })
        };
        // first pass: structures, faces, roles (names assigned on legal sides)
        for (slot, &ci) in perm.iter().enumerate() {
            let comp = &self.components[ci];
            let map = &maps[ci][choice[slot]];
            let g = comp.graph.relabeled(map);
            let h = g.halfedges();
            let n = h.n_half();
            out.push(u64::MAX - 1);
            out.push(n as u64);
            out.push(g.is_ghost() as u64);
            for j in 0..n {
                out.push(h.rotation[j] as u64);
            }
            for j in 0..n {
                out.push(h.pairing[j] as u64);
            }
            for j in 0..n {
                out.push(g.is_boundary_half(j) as u64);
            }
            // face labels by min half
            let faces = g.internal_faces();
            for (i, f) in faces.iter().enumerate() {
                out.push(f.iter().min().copied().unwrap() as u64);
                out.push(*g.face_labels().get(&i).unwrap_or(&0) as u64);
            }
            // roles on marked vertices, emitted and named in relabeled order
            let vertices = h.vertices();
            let old_vertices = comp.graph.halfedges().vertices();
            let mut role_by_min: BTreeMap<usize, PointRole> = BTreeMap::new();
            for (ovi, ov) in old_vertices.iter().enumerate() {
                if let Some(role) = comp.roles.get(&ovi) {
                    let target = map[ov[0]];
                    let nvi = vertices.iter().position(|nv| nv.contains(&target)).unwrap();
                    let min = vertices[nvi].iter().min().copied().unwrap();
                    role_by_min.insert(min, *role);
                }
            }
            for (min, role) in role_by_min {
                let (tag, val) = match role {
                    PointRole::Labeled(j) => (1u64, j as u64),
                    PointRole::LegalNode(id) => (2u64, name(id, &mut rename)),
                };
                out.push(min as u64);
                out.push(tag);
                out.push(val);
            }
        }
        // second pass: slot lists on relabeled boundary edges
        for (slot, &ci) in perm.iter().enumerate() {
            let comp = &self.components[ci];
            let map = &maps[ci][choice[slot]];
            out.push(u64::MAX - 2);
            let pairing = &comp.graph.halfedges().pairing;
            let mut lists: BTreeMap<usize, &Vec<usize>> = BTreeMap::new();
            for (&e, ids) in &comp.slots {
                if ids.is_empty() {
                    continue;
                }
                let new_rep = map[e].min(map[pairing[e]]);
                lists.insert(new_rep, ids);
            }
            for (rep, ids) in lists {
                out.push(rep as u64);
                out.push(ids.len() as u64);
                // order along the boundary edge is part of the structure
                let oriented = self.slot_order_under(ci, map, ids);
                for id in oriented {
                    out.push(name(id, &mut rename));
                }
            }
        }
        out
    }

    /// Slot lists are stored from the with-orientation half's base vertex;
    /// a relabeling never reverses a boundary edge (it preserves the
    /// boundary set), so the stored order carries over unchanged.
    fn slot_order_under(&self, _ci: usize, _map: &[usize], ids: &[usize]) -> Vec<usize> {
        ids.to_vec()
    }
}

/// One catalog entry with its automorphism count.
#[derive(Clone, Debug)]
pub struct NodalEntry {
    pub graph: NodalGraph,
    pub aut: u64,
}

/// All isomorphism classes of odd critical nodal (g,k,l)-graphs with m
/// nodes, sorted by canonical code.
#[derive(Clone, Debug)]
pub struct NodalCatalog {
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub entries: Vec<NodalEntry>,
}

impl NodalCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Supplies odd smooth catalogs to the nodal assembler: memoized, with an
/// optional disk cache behind the memory layer.
pub struct OddCatalogSource {
    limits: EnumLimits,
    cache: BTreeMap<(usize, usize, usize), GraphCatalog>,
    disk: Option<crate::io::CatalogCache>,
}

impl OddCatalogSource {
    pub fn new(limits: EnumLimits) -> Self {
        OddCatalogSource {
            limits,
            cache: BTreeMap::new(),
            disk: None,
        }
    }

    pub fn with_cache(limits: EnumLimits, dir: std::path::PathBuf) -> Self {
        OddCatalogSource {
            limits,
            cache: BTreeMap::new(),
            disk: Some(crate::io::CatalogCache::new(dir)),
        }
    }

    pub fn odd(&mut self, g: usize, k: usize, l: usize) -> Result<&GraphCatalog, EnumError> {
        use crate::enumerate::Signature;
        if !self.cache.contains_key(&(g, k, l)) {
            let signature = Signature::Open { g, k, l, odd: true };
            let cached = self.disk.as_ref().and_then(|d| d.load(signature));
            let odd = match cached {
                Some(c) => c,
                None => {
                    let full = enumerate_open_trivalent(g, k, l, &self.limits)?;
                    let odd = odd_subset(&full);
                    if let Some(d) = &self.disk {
                        // best effort: a failed write only costs a recompute
                        let _ = d.store(&odd);
                    }
                    odd
                }
            };
            self.cache.insert((g, k, l), odd);
        }
        Ok(&self.cache[&(g, k, l)])
    }

    /// Full (not odd-filtered) catalog, disk-cached the same way.
    pub fn full(&mut self, g: usize, k: usize, l: usize) -> Result<GraphCatalog, EnumError> {
        use crate::enumerate::Signature;
        let signature = Signature::Open { g, k, l, odd: false };
        if let Some(c) = self.disk.as_ref().and_then(|d| d.load(signature)) {
            return Ok(c);
        }
        let full = enumerate_open_trivalent(g, k, l, &self.limits)?;
        if let Some(d) = &self.disk {
            let _ = d.store(&full);
        }
        Ok(full)
    }
}

fn set_partitions(n: usize, blocks: usize) -> Vec<Vec<Vec<usize>>> {
    // partitions of {1..n} into exactly `blocks` nonempty blocks,
    // blocks ordered by minimum element
    fn rec(item: usize, n: usize, blocks: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if item > n {
            if cur.len() == blocks {
                out.push(cur.clone());
            }
            return;
        }
        let remaining = n - item + 1;
        // must still be able to open enough blocks
        if cur.len() + remaining < blocks {
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(item);
            rec(item + 1, n, blocks, cur, out);
            cur[b].pop();
        }
        if cur.len() < blocks {
            cur.push(vec![item]);
            rec(item + 1, n, blocks, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if blocks == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = Vec::new();
    rec(1, n, blocks, &mut cur, &mut out);
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=total {
            cur.push(x);
            rec(total - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(total, parts, &mut cur, &mut out);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(used, cur, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Relabels a catalog entry's faces from local 1..=l_i to the given global
/// labels (increasing order), dropping its point labels.
fn globalize_faces(graph: &OpenTrivalentGraph, global: &[usize]) -> OpenTrivalentGraph {
    let mut face_labels = BTreeMap::new();
    for (&fi, &local) in graph.face_labels() {
        face_labels.insert(fi, global[local - 1]);
    }
    graph
        .with_labels(face_labels, BTreeMap::new())
        .expect("relabeling preserves validity")
}

struct ComponentSpec {
    /// odd catalog entries with faces globalized and point labels dropped
    dressed: Vec<OpenTrivalentGraph>,
}

/// Enumerates all isomorphism classes of odd critical nodal graphs with
/// the given totals. Components are drawn from odd smooth catalogs; ghost
/// components carry three points and no faces.
pub fn enumerate_nodal(
    g: usize,
    k: usize,
    l: usize,
    m: usize,
    source: &mut OddCatalogSource,
    limits: &EnumLimits,
) -> Result<NodalCatalog, EnumError> {
    let mut classes: BTreeMap<Vec<u8>, NodalEntry> = BTreeMap::new();
    let dim = 3 * (g as i64) - 3 + k as i64 + 2 * l as i64;
    if dim < 0 || (m as i64) > dim {
        return Ok(NodalCatalog { g, k, l, m, entries: Vec::new() });
    }
    let points_total = k + m;
    for c in 1..=(m + 1) {
        let gsum = g as i64 + c as i64 - 1 - m as i64;
        if gsum < 0 {
            continue;
        }
        let gsum = gsum as usize;
        for n_ghost in 0..=c {
            let n_core = c - n_ghost;
            if n_core > l || (n_core == 0 && l > 0) {
                continue;
            }
            if n_core == 0 && gsum > 0 {
                continue;
            }
            if 3 * n_ghost > points_total {
                continue;
            }
            let core_points = points_total - 3 * n_ghost;
            for face_partition in set_partitions(l, n_core) {
                for genus_comp in compositions(gsum, n_core) {
                    for point_comp in compositions(core_points, n_core) {
                        assemble(
                            g,
                            k,
                            l,
                            m,
                            &face_partition,
                            &genus_comp,
                            &point_comp,
                            n_ghost,
                            source,
                            limits,
                            &mut classes,
                        )?;
                    }
                }
            }
        }
    }
    Ok(NodalCatalog {
        g,
        k,
        l,
        m,
        entries: classes.into_values().collect(),
    })
}

/// Marker value for interchangeable legal points while a component is
/// dressed: real labels are 1..=k, the marker sits above them.
fn legal_marker(k: usize) -> usize {
    k + 1
}

/// All ways to decorate one stripped component with the given label set
/// plus interchangeable legal markers, up to isomorphism of the component.
fn dressed_variants(
    graphs: &[OpenTrivalentGraph],
    label_set: &[usize],
    legal_count: usize,
    k: usize,
) -> Vec<OpenTrivalentGraph> {
    let marker = legal_marker(k);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let p = label_set.len() + legal_count;
    for g in graphs {
        let marked = g.marked_vertices();
        debug_assert_eq!(marked.len(), p);
        // tokens: the labels then `legal_count` copies of the marker
        let mut tokens: Vec<usize> = label_set.to_vec();
        tokens.extend(std::iter::repeat(marker).take(legal_count));
        for perm in permutations(p) {
            let point_labels: BTreeMap<usize, usize> = marked
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, tokens[perm[i]]))
                .collect();
            let dressed = g
                .with_labels(g.face_labels().clone(), point_labels)
                .expect("dressing preserves validity");
            if seen.insert(dressed.canonical_form().0) {
                out.push(dressed);
            }
        }
    }
    out
}

/// Distributes the global label set over components with the given point
/// capacities; each component receives a sorted subset.
fn label_distributions(k: usize, capacities: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn rec(
        labels: &[usize],
        capacities: &[usize],
        idx: usize,
        cur: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if idx == capacities.len() {
            if labels.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        let tail_capacity: usize = capacities[idx + 1..].iter().sum();
        let max_here = capacities[idx].min(labels.len());
        for take in 0..=max_here {
            if labels.len() - take > tail_capacity {
                continue;
            }
            for subset in combinations(labels.len(), take) {
                let chosen: Vec<usize> = subset.iter().map(|&i| labels[i]).collect();
                let rest: Vec<usize> = labels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, &x)| x)
                    .collect();
                cur.push(chosen);
                rec(&rest, capacities, idx + 1, cur, out);
                cur.pop();
            }
        }
    }
    let labels: Vec<usize> = (1..=k).collect();
    let mut out = Vec::new();
    rec(&labels, capacities, 0, &mut Vec::new(), &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    g_total: usize,
    k: usize,
    l: usize,
    m: usize,
    face_partition: &[Vec<usize>],
    genus_comp: &[usize],
    point_comp: &[usize],
    n_ghost: usize,
    source: &mut OddCatalogSource,
    limits: &EnumLimits,
    classes: &mut BTreeMap<Vec<u8>, NodalEntry>,
) -> Result<(), EnumError> {
    let n_core = face_partition.len();
    // stripped per-component graph choices
    let mut specs: Vec<ComponentSpec> = Vec::new();
    let mut capacities: Vec<usize> = Vec::new();
    for i in 0..n_core {
        let (gi, pi, li) = (genus_comp[i], point_comp[i], face_partition[i].len());
        if 2 * gi + pi + 2 * li <= 2 {
            return Ok(()); // unstable component spec
        }
        let catalog = source.odd(gi, pi, li)?;
        if catalog.is_empty() {
            return Ok(());
        }
        let mut dressed: Vec<OpenTrivalentGraph> = Vec::new();
        let mut seen = BTreeSet::new();
        for e in &catalog.entries {
            let d = globalize_faces(&e.graph, &face_partition[i]);
            if seen.insert(d.canonical_form().0) {
                dressed.push(d);
            }
        }
        specs.push(ComponentSpec { dressed });
        capacities.push(pi);
    }
    for _ in 0..n_ghost {
        let catalog = source.odd(0, 3, 0)?;
        let mut dressed: Vec<OpenTrivalentGraph> = Vec::new();
        let mut seen = BTreeSet::new();
        for e in &catalog.entries {
            let d = e
                .graph
                .with_labels(BTreeMap::new(), BTreeMap::new())
                .expect("ghost stays valid unlabeled");
            if seen.insert(d.canonical_form().0) {
                dressed.push(d);
            }
        }
        specs.push(ComponentSpec { dressed });
        capacities.push(3);
    }
    for distribution in label_distributions(k, &capacities) {
        // decorate each component independently, modulo its own symmetry
        let variants: Vec<Vec<OpenTrivalentGraph>> = specs
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let legals = capacities[i] - distribution[i].len();
                dressed_variants(&spec.dressed, &distribution[i], legals, k)
            })
            .collect();
        if variants.iter().any(|v| v.is_empty()) {
            continue;
        }
        let sizes: Vec<usize> = variants.iter().map(|v| v.len()).collect();
        let total: usize = sizes.iter().product();
        for mut idx in 0..total {
            let mut graphs: Vec<&OpenTrivalentGraph> = Vec::with_capacity(specs.len());
            for (i, &s) in sizes.iter().enumerate() {
                graphs.push(&variants[i][idx % s]);
                idx /= s;
            }
            // roles: marker labels become legal sides, ids in point order
            let marker = legal_marker(k);
            let mut roles: Vec<BTreeMap<usize, PointRole>> = vec![BTreeMap::new(); graphs.len()];
            let mut node_id = 0usize;
            for (ci, g) in graphs.iter().enumerate() {
                for v in g.marked_vertices() {
                    let lab = *g.point_labels().get(&v).expect("dressed point");
                    if lab == marker {
                        roles[ci].insert(v, PointRole::LegalNode(node_id));
                        node_id += 1;
                    } else {
                        roles[ci].insert(v, PointRole::Labeled(lab));
                    }
                }
            }
            debug_assert_eq!(node_id, m);
            let mut edge_hosts: Vec<(usize, usize)> = Vec::new();
            for (ci, g) in graphs.iter().enumerate() {
                if g.is_ghost() {
                    continue;
                }
                for b in g.boundary_halves() {
                    let rep = b.min(g.halfedges().pairing[b]);
                    edge_hosts.push((ci, rep));
                }
            }
            place_slots(g_total, k, l, m, &graphs, &roles, &edge_hosts, limits, classes)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn place_slots(
    g_total: usize,
    k: usize,
    l: usize,
    m: usize,
    graphs: &[&OpenTrivalentGraph],
    roles: &[BTreeMap<usize, PointRole>],
    edge_hosts: &[(usize, usize)],
    limits: &EnumLimits,
    classes: &mut BTreeMap<Vec<u8>, NodalEntry>,
) -> Result<(), EnumError> {
    // sequential insertion: each node id goes to an (edge, position) pair
    fn rec(
        next_id: usize,
        m: usize,
        edge_hosts: &[(usize, usize)],
        lists: &mut BTreeMap<(usize, usize), Vec<usize>>,
        finish: &mut impl FnMut(&BTreeMap<(usize, usize), Vec<usize>>) -> Result<(), EnumError>,
    ) -> Result<(), EnumError> {
        if next_id == m {
            return finish(lists);
        }
        for &(ci, e) in edge_hosts {
            let len = lists.get(&(ci, e)).map_or(0, |v| v.len());
            for pos in 0..=len {
                lists.entry((ci, e)).or_default().insert(pos, next_id);
                rec(next_id + 1, m, edge_hosts, lists, finish)?;
                let v = lists.get_mut(&(ci, e)).unwrap();
                v.remove(pos);
                if v.is_empty() {
                    lists.remove(&(ci, e));
                }
            }
        }
        Ok(())
    }
    if m > 0 && edge_hosts.is_empty() {
        return Ok(());
    }
    let mut finish = |lists: &BTreeMap<(usize, usize), Vec<usize>>| -> Result<(), EnumError> {
        let components: Vec<NodalComponent> = graphs
            .iter()
            .enumerate()
            .map(|(ci, g)| {
                let slots: BTreeMap<usize, Vec<usize>> = lists
                    .iter()
                    .filter(|((c, _), _)| *c == ci)
                    .map(|((_, e), ids)| (*e, ids.clone()))
                    .collect();
                // roles supersede the dressing tags
                let bare = g
                    .with_labels(g.face_labels().clone(), BTreeMap::new())
                    .expect("stripping labels keeps the graph valid");
                NodalComponent {
                    graph: bare,
                    roles: roles[ci].clone(),
                    slots,
                }
            })
            .collect();
        let nodal = NodalGraph { components };
        let stats = match nodal.validate() {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        if stats.genus != g_total
            || stats.boundary_points != k
            || stats.faces != l
            || stats.nodes != m
        {
            return Ok(());
        }
        if classes.len() >= limits.max_entries {
            return Err(EnumError::ResourceCap {
                kind: "nodal catalog entries",
                bound: limits.max_entries as u64,
            });
        }
        let code = nodal.canonical_code();
        classes.entry(code).or_insert_with(|| {
            let aut = nodal.automorphism_count();
            NodalEntry { graph: nodal, aut }
        });
        Ok(())
    };
    let mut lists = BTreeMap::new();
    rec(0, m, edge_hosts, &mut lists, &mut finish)
}

/// Independent reference assembler: assigns the k labels directly over
/// all point positions of all component tuples, with no per-component
/// symmetry reduction, and dedups at the very end. Exponential in the
/// point count; used to validate the fast path on small signatures.
pub fn oracle_nodal(
    g: usize,
    k: usize,
    l: usize,
    m: usize,
    source: &mut OddCatalogSource,
    limits: &EnumLimits,
) -> Result<NodalCatalog, EnumError> {
    let mut classes: BTreeMap<Vec<u8>, NodalEntry> = BTreeMap::new();
    let dim = 3 * (g as i64) - 3 + k as i64 + 2 * l as i64;
    if dim < 0 || (m as i64) > dim {
        return Ok(NodalCatalog { g, k, l, m, entries: Vec::new() });
    }
    let points_total = k + m;
    for c in 1..=(m + 1) {
        let gsum = g as i64 + c as i64 - 1 - m as i64;
        if gsum < 0 {
            continue;
        }
        let gsum = gsum as usize;
        for n_ghost in 0..=c {
            let n_core = c - n_ghost;
            if n_core > l || (n_core == 0 && l > 0) || (n_core == 0 && gsum > 0) {
                continue;
            }
            if 3 * n_ghost > points_total {
                continue;
            }
            let core_points = points_total - 3 * n_ghost;
            for face_partition in set_partitions(l, n_core) {
                for genus_comp in compositions(gsum, n_core) {
                    for point_comp in compositions(core_points, n_core) {
                        let mut specs: Vec<Vec<OpenTrivalentGraph>> = Vec::new();
                        let mut feasible = true;
                        for i in 0..n_core {
                            let (gi, pi, li) =
                                (genus_comp[i], point_comp[i], face_partition[i].len());
                            if 2 * gi + pi + 2 * li <= 2 {
                                feasible = false;
                                break;
                            }
                            let catalog = source.odd(gi, pi, li)?;
                            if catalog.is_empty() {
                                feasible = false;
                                break;
                            }
                            let mut dressed = Vec::new();
                            let mut seen = BTreeSet::new();
                            for e in &catalog.entries {
                                let d = globalize_faces(&e.graph, &face_partition[i]);
                                if seen.insert(d.canonical_form().0) {
                                    dressed.push(d);
                                }
                            }
                            specs.push(dressed);
                        }
                        if !feasible {
                            continue;
                        }
                        for _ in 0..n_ghost {
                            let catalog = source.odd(0, 3, 0)?;
                            let mut dressed = Vec::new();
                            let mut seen = BTreeSet::new();
                            for e in &catalog.entries {
                                let d = e
                                    .graph
                                    .with_labels(BTreeMap::new(), BTreeMap::new())
                                    .expect("ghost stays valid unlabeled");
                                if seen.insert(d.canonical_form().0) {
                                    dressed.push(d);
                                }
                            }
                            specs.push(dressed);
                        }
                        let sizes: Vec<usize> = specs.iter().map(|s| s.len()).collect();
                        let total: usize = sizes.iter().product();
                        for mut idx in 0..total {
                            let mut graphs: Vec<&OpenTrivalentGraph> = Vec::new();
                            for (i, &s) in sizes.iter().enumerate() {
                                graphs.push(&specs[i][idx % s]);
                                idx /= s;
                            }
                            let mut point_slots: Vec<(usize, usize)> = Vec::new();
                            for (ci, gg) in graphs.iter().enumerate() {
                                for v in gg.marked_vertices() {
                                    point_slots.push((ci, v));
                                }
                            }
                            for label_positions in combinations(point_slots.len(), k) {
                                for label_perm in permutations(k) {
                                    let mut roles: Vec<BTreeMap<usize, PointRole>> =
                                        vec![BTreeMap::new(); graphs.len()];
                                    for (pos_idx, &slot_idx) in label_positions.iter().enumerate() {
                                        let (ci, v) = point_slots[slot_idx];
                                        roles[ci].insert(
                                            v,
                                            PointRole::Labeled(label_perm[pos_idx] + 1),
                                        );
                                    }
                                    let mut node_id = 0usize;
                                    for &(ci, v) in &point_slots {
                                        if !roles[ci].contains_key(&v) {
                                            roles[ci].insert(v, PointRole::LegalNode(node_id));
                                            node_id += 1;
                                        }
                                    }
                                    let mut edge_hosts: Vec<(usize, usize)> = Vec::new();
                                    for (ci, gg) in graphs.iter().enumerate() {
                                        if gg.is_ghost() {
                                            continue;
                                        }
                                        for b in gg.boundary_halves() {
                                            let rep = b.min(gg.halfedges().pairing[b]);
                                            edge_hosts.push((ci, rep));
                                        }
                                    }
                                    place_slots(
                                        g, k, l, m, &graphs, &roles, &edge_hosts, limits,
                                        &mut classes,
                                    )?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(NodalCatalog {
        g,
        k,
        l,
        m,
        entries: classes.into_values().collect(),
    })
}

/// Splits each slotted boundary edge by inserting one degree-2 vertex per
/// illegal side, in boundary order. The inserted points stay unlabeled;
/// original roles are recorded as point labels by role order so the graph
/// remains decorated. Used to check the two equivalent descriptions of a
/// nodal graph against each other.
pub fn insert_illegal_points(comp: &NodalComponent) -> (OpenTrivalentGraph, usize) {
    let g = &comp.graph;
    let h = g.halfedges();
    let n = h.n_half();
    let extra = 2 * comp.slots.values().map(|v| v.len()).sum::<usize>();
    let mut rotation: Vec<usize> = h.rotation.clone();
    let mut pairing: Vec<usize> = h.pairing.clone();
    let mut is_bd: Vec<bool> = (0..n).map(|x| g.is_boundary_half(x)).collect();
    rotation.resize(n + extra, UNSET_SPLIT);
    pairing.resize(n + extra, UNSET_SPLIT);
    is_bd.resize(n + extra, false);
    let mut next = n;
    for (&e, ids) in &comp.slots {
        // with-orientation half f runs from the edge's base vertex
        let (b, f) = if g.is_boundary_half(e) {
            (e, h.pairing[e])
        } else {
            (h.pairing[e], e)
        };
        // split repeatedly: walk from f's side inserting one vertex per id
        let mut cur_f = f;
        let cur_b = b;
        for _ in ids {
            let nf = next; // with-orientation half out of the new vertex
            let nb = next + 1; // against-orientation half at the new vertex
            next += 2;
            // new vertex rotation: (nf, nb)
            rotation[nf] = nb;
            rotation[nb] = nf;
            pairing[cur_f] = nb;
            pairing[nb] = cur_f;
            pairing[nf] = cur_b;
            pairing[cur_b] = nf;
            is_bd[nb] = true;
            is_bd[nf] = false;
            cur_f = nf;
        }
        let _ = cur_b;
    }
    let hs = HalfEdgeStructure { rotation, pairing };
    let bd: Vec<usize> = (0..n + extra).filter(|&x| is_bd[x]).collect();
    let expanded = OpenTrivalentGraph::new(hs, &bd, g.face_labels().clone(), BTreeMap::new())
        .expect("edge splitting preserves validity");
    (expanded, extra / 2)
}

const UNSET_SPLIT: usize = usize::MAX;

/// Removes unlabeled degree-2 boundary vertices by merging their two
/// edges, undoing `insert_illegal_points` (labels identify real points).
pub fn erase_unmarked_points(
    g: &OpenTrivalentGraph,
    real_points: &BTreeSet<usize>,
) -> OpenTrivalentGraph {
    let h = g.halfedges();
    let vertices = h.vertices();
    let kinds = g.vertex_kinds();
    let mut pairing = h.pairing.clone();
    let mut dead: Vec<bool> = vec![false; g.n_half()];
    for (vi, v) in vertices.iter().enumerate() {
        if kinds[vi] != VertexKind::Marked || real_points.contains(&vi) {
            continue;
        }
        // v = { with-half nf, against-half nb }: reconnect the neighbors
        let (nf, nb) = if g.is_boundary_half(v[0]) {
            (v[1], v[0])
        } else {
            (v[0], v[1])
        };
        let far_f = pairing[nb];
        let far_b = pairing[nf];
        pairing[far_f] = far_b;
        pairing[far_b] = far_f;
        dead[nf] = true;
        dead[nb] = true;
    }
    // compact ids
    let mut newid = vec![UNSET_SPLIT; g.n_half()];
    let mut cnt = 0;
    for x in 0..g.n_half() {
        if !dead[x] {
            newid[x] = cnt;
            cnt += 1;
        }
    }
    let mut rotation = vec![0; cnt];
    let mut new_pairing = vec![0; cnt];
    let mut bd = Vec::new();
    for x in 0..g.n_half() {
        if dead[x] {
            continue;
        }
        rotation[newid[x]] = newid[h.rotation[x]];
        new_pairing[newid[x]] = newid[pairing[x]];
        if g.is_boundary_half(x) {
            bd.push(newid[x]);
        }
    }
    // carry face labels through by membership
    let old_faces = g.internal_faces();
    let hs = HalfEdgeStructure {
        rotation,
        pairing: new_pairing,
    };
    let skeleton = OpenTrivalentGraph::new(hs.clone(), &bd, BTreeMap::new(), BTreeMap::new())
        .expect("edge merging preserves validity");
    let new_faces = skeleton.internal_faces();
    let mut face_labels = BTreeMap::new();
    for (i, f) in old_faces.iter().enumerate() {
        if let Some(&lab) = g.face_labels().get(&i) {
            if let Some(&surv) = f.iter().find(|&&x| !dead[x]) {
                let ni = new_faces
                    .iter()
                    .position(|nf| nf.contains(&newid[surv]))
                    .unwrap();
                face_labels.insert(ni, lab);
            }
        }
    }
    skeleton
        .with_labels(face_labels, BTreeMap::new())
        .expect("labels survive merging")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source() -> OddCatalogSource {
        OddCatalogSource::new(EnumLimits::default())
    }

    fn disk_component_with_self_node() -> NodalGraph {
        let mut src = source();
        let disk = src.odd(0, 1, 1).unwrap().entries[0].graph.clone();
        let disk = disk.with_labels(disk.face_labels().clone(), BTreeMap::new()).unwrap();
        let v = disk.marked_vertices()[0];
        let e = {
            let b = disk.boundary_halves()[0];
            b.min(disk.halfedges().pairing[b])
        };
        NodalGraph {
            components: vec![NodalComponent {
                graph: disk,
                roles: BTreeMap::from([(v, PointRole::LegalNode(0))]),
                slots: BTreeMap::from([(e, vec![0usize])]),
            }],
        }
    }

    #[test]
    fn self_node_genus_bookkeeping() {
        let n = disk_component_with_self_node();
        let s = n.validate().unwrap();
        // one disk, one node: g = 0 + 1 - 1 + 1 = 1
        assert_eq!((s.genus, s.nodes, s.components, s.boundary_points, s.faces), (1, 1, 1, 0, 1));
    }

    #[test]
    fn validator_rejects_duplicates_and_ghost_slots() {
        let mut n = disk_component_with_self_node();
        n.components[0]
            .slots
            .values_mut()
            .next()
            .unwrap()
            .push(0);
        assert_eq!(n.validate(), Err(NodalError::DuplicateNodeId(0)));

        let mut src = source();
        let ghost = src.odd(0, 3, 0).unwrap().entries[0].graph.clone();
        let ghost = ghost.with_labels(BTreeMap::new(), BTreeMap::new()).unwrap();
        let marked = ghost.marked_vertices();
        let e = {
            let b = ghost.boundary_halves()[0];
            b.min(ghost.halfedges().pairing[b])
        };
        let bad = NodalGraph {
            components: vec![NodalComponent {
                graph: ghost,
                roles: BTreeMap::from([
                    (marked[0], PointRole::Labeled(1)),
                    (marked[1], PointRole::Labeled(2)),
                    (marked[2], PointRole::LegalNode(0)),
                ]),
                slots: BTreeMap::from([(e, vec![0usize])]),
            }],
        };
        assert_eq!(bad.validate(), Err(NodalError::GhostSlot(0)));
    }

    #[test]
    fn nodal_count_1_0_1_1() {
        let mut src = source();
        let cat = enumerate_nodal(1, 0, 1, 1, &mut src, &EnumLimits::default()).unwrap();
        assert_eq!(cat.len(), 1);
        assert_eq!(cat.entries[0].aut, 1);
    }

    #[test]
    fn nodal_counts_0_5_1() {
        let mut src = source();
        let lim = EnumLimits::default();
        assert_eq!(enumerate_nodal(0, 5, 1, 0, &mut src, &lim).unwrap().len(), 24);
        assert_eq!(enumerate_nodal(0, 5, 1, 1, &mut src, &lim).unwrap().len(), 120);
        assert_eq!(enumerate_nodal(0, 5, 1, 2, &mut src, &lim).unwrap().len(), 120);
    }

    #[test]
    fn nodal_counts_0_1_2() {
        let mut src = source();
        let lim = EnumLimits::default();
        assert_eq!(enumerate_nodal(0, 1, 2, 0, &mut src, &lim).unwrap().len(), 4);
        assert_eq!(enumerate_nodal(0, 1, 2, 1, &mut src, &lim).unwrap().len(), 2);
        assert_eq!(enumerate_nodal(0, 1, 2, 2, &mut src, &lim).unwrap().len(), 0);
    }

    #[test]
    fn ghost_admitted_at_0_3_0() {
        let mut src = source();
        let cat = enumerate_nodal(0, 3, 0, 0, &mut src, &EnumLimits::default()).unwrap();
        assert_eq!(cat.len(), 2);
    }

    #[test]
    fn relabeled_copy_has_same_code() {
        let n = disk_component_with_self_node();
        let code = n.canonical_code();
        // rebuild with a different node id
        let mut n2 = n.clone();
        for comp in &mut n2.components {
            for role in comp.roles.values_mut() {
                if let PointRole::LegalNode(id) = role {
                    *id += 17;
                }
            }
            for ids in comp.slots.values_mut() {
                for id in ids.iter_mut() {
                    *id += 17;
                }
            }
        }
        assert_eq!(code, n2.canonical_code());
    }

    /// Triangle whose three points are all legal sides, with one self-slot
    /// per boundary edge. The symmetric arrangement rotates onto itself;
    /// the skewed one does not.
    fn triangle_self_nodes(symmetric: bool) -> NodalGraph {
        let mut src = source();
        let tri = src.odd(0, 3, 1).unwrap().entries[0].graph.clone();
        let bare = tri
            .with_labels(tri.face_labels().clone(), BTreeMap::new())
            .unwrap();
        let marked = bare.marked_vertices();
        let h = bare.halfedges();
        // boundary edge leaving each marked vertex, in vertex order
        let edge_of: Vec<usize> = marked
            .iter()
            .map(|&v| {
                let halves = h
                    .vertices()
                    .into_iter()
                    .find(|cyc| cyc.iter().any(|x| {
                        h.vertices();
                        false
                    }))
                    .unwrap_or_default();
                let _ = halves;
                0
            })
            .collect();
        let _ = edge_of;
        // simpler: boundary edge reps sorted
        let mut reps: Vec<usize> = bare
            .boundary_halves()
            .iter()
            .map(|&b| b.min(h.pairing[b]))
            .collect();
        reps.sort_unstable();
        let roles: BTreeMap<usize, PointRole> = marked
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, PointRole::LegalNode(i)))
            .collect();
        let slots: BTreeMap<usize, Vec<usize>> = if symmetric {
            // node i sits on edge i: the rotation carries the pattern along
            reps.iter().enumerate().map(|(i, &e)| (e, vec![i])).collect()
        } else {
            // all three nodes stacked on one edge
            BTreeMap::from([(reps[0], vec![0usize, 1, 2])])
        };
        NodalGraph {
            components: vec![NodalComponent {
                graph: bare,
                roles,
                slots,
            }],
        }
    }

    /// Independent automorphism count: try every unlabeled relabeling of
    /// every component and check role, pairing, and slot preservation by
    /// hand.
    fn brute_force_aut(n: &NodalGraph) -> usize {
        assert_eq!(n.components.len(), 1, "single-component oracle");
        let comp = &n.components[0];
        let g = &comp.graph;
        let h = g.halfedges();
        let mut count = 0usize;
        // legal-point vertex per node id, slot position per node id
        let legal_vertex: BTreeMap<usize, usize> = comp
            .roles
            .iter()
            .filter_map(|(v, r)| match r {
                PointRole::LegalNode(id) => Some((*id, *v)),
                _ => None,
            })
            .collect();
        for auto in g.automorphisms_unlabeled() {
            // induced vertex map
            let vertices = h.vertices();
            let vertex_image = |vi: usize| -> usize {
                let target = auto[vertices[vi][0]];
                vertices.iter().position(|v| v.contains(&target)).unwrap()
            };
            // node renaming induced by legal sides
            let rename: BTreeMap<usize, usize> = legal_vertex
                .iter()
                .map(|(&id, &v)| {
                    let vi2 = vertex_image(v);
                    let id2 = legal_vertex
                        .iter()
                        .find(|(_, &w)| w == vi2)
                        .map(|(&i2, _)| i2);
                    (id, id2.unwrap_or(usize::MAX))
                })
                .collect();
            if rename.values().any(|&x| x == usize::MAX) {
                continue;
            }
            // labeled roles must be fixed
            let roles_ok = comp.roles.iter().all(|(v, r)| match r {
                PointRole::Labeled(j) => {
                    comp.roles.get(&vertex_image(*v)) == Some(&PointRole::Labeled(*j))
                }
                PointRole::LegalNode(_) => true,
            });
            if !roles_ok {
                continue;
            }
            // slot lists must map edge-to-edge preserving order
            let slots_ok = comp.slots.iter().all(|(&e, ids)| {
                let e2 = auto[e].min(h.pairing[auto[e]]);
                match comp.slots.get(&e2) {
                    Some(ids2) => {
                        ids.len() == ids2.len()
                            && ids.iter().zip(ids2).all(|(a, b)| rename[a] == *b)
                    }
                    None => false,
                }
            });
            if slots_ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn symmetric_legal_nodes_detected() {
        let symmetric = triangle_self_nodes(true);
        symmetric.validate().unwrap();
        assert_eq!(symmetric.automorphism_count(), 3);
        assert_eq!(brute_force_aut(&symmetric), 3);

        let skewed = triangle_self_nodes(false);
        skewed.validate().unwrap();
        assert_eq!(skewed.automorphism_count(), 1);
        assert_eq!(brute_force_aut(&skewed), 1);
    }

    #[test]
    fn insert_and_erase_points_round_trip() {
        let n = disk_component_with_self_node();
        let comp = &n.components[0];
        let (expanded, inserted) = insert_illegal_points(comp);
        assert_eq!(inserted, 1);
        let s = expanded.stats().unwrap();
        assert_eq!(s.boundary_points, 2);
        assert_eq!(s.edges, 2);
        // erase the unlabeled inserted point: original disk returns
        let real: BTreeSet<usize> = comp.roles.keys().copied().collect();
        let erased = erase_unmarked_points(&expanded, &real);
        assert_eq!(
            erased.canonical_form().0,
            comp.graph.canonical_form().0
        );
    }
}
