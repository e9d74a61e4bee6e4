//! Interchange formats and the on-disk catalog cache.
//!
//! Graphs cross process boundaries as JSON objects with 0-based half-edge
//! indices; catalogs are JSON-lines, one graph per line with its
//! automorphism count. Cache files live under a configurable directory,
//! keyed by schema version, crate version, and signature, and are written
//! atomically (temp file + rename).

use crate::enumerate::{CatalogEntry, GraphCatalog, Signature};
use crate::nodal::{NodalComponent, NodalGraph, PointRole};
use crate::ribbon::{HalfEdgeStructure, OpenTrivalentGraph, RibbonError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph fails validation: {0}")]
    Graph(#[from] RibbonError),
    #[error("cache entry has wrong version header")]
    VersionMismatch,
    #[error("malformed role or slot key: {0}")]
    BadKey(String),
}

/// Wire form of an open or closed trivalent graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n_half: usize,
    pub sigma0: Vec<usize>,
    pub sigma1: Vec<usize>,
    pub boundary_halves: Vec<usize>,
    #[serde(default)]
    pub face_labels: BTreeMap<usize, usize>,
    #[serde(default)]
    pub point_labels: BTreeMap<usize, usize>,
}

impl GraphJson {
    pub fn from_graph(g: &OpenTrivalentGraph) -> Self {
        GraphJson {
            n_half: g.n_half(),
            sigma0: g.halfedges().rotation.clone(),
            sigma1: g.halfedges().pairing.clone(),
            boundary_halves: g.boundary_halves(),
            face_labels: g.face_labels().clone(),
            point_labels: g.point_labels().clone(),
        }
    }

    /// Rebuilds and validates. A marked circle with no face labels is a
    /// ghost; everything else with empty boundary is closed or open by
    /// its boundary set.
    pub fn to_graph(&self) -> Result<OpenTrivalentGraph, RibbonError> {
        let h = HalfEdgeStructure::new(self.sigma0.clone(), self.sigma1.clone())?;
        let probe = OpenTrivalentGraph::new(
            h.clone(),
            &self.boundary_halves,
            BTreeMap::new(),
            BTreeMap::new(),
        );
        let ghost_shape = match &probe {
            Ok(g) => !g.is_closed() && !g.has_internal_edges(),
            Err(_) => false,
        };
        if ghost_shape && self.face_labels.is_empty() {
            OpenTrivalentGraph::new_ghost(h, &self.boundary_halves, self.point_labels.clone())
        } else {
            OpenTrivalentGraph::new(
                h,
                &self.boundary_halves,
                self.face_labels.clone(),
                self.point_labels.clone(),
            )
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogLine {
    pub graph: GraphJson,
    pub aut: u64,
}

pub fn catalog_to_jsonl(catalog: &GraphCatalog) -> String {
    let mut out = String::new();
    for e in &catalog.entries {
        let line = CatalogLine {
            graph: GraphJson::from_graph(&e.graph),
            aut: e.aut,
        };
        out.push_str(&serde_json::to_string(&line).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn catalog_from_jsonl(signature: Signature, text: &str) -> Result<GraphCatalog, IoError> {
    let mut entries = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: CatalogLine = serde_json::from_str(line)?;
        let graph = parsed.graph.to_graph()?;
        entries.push(CatalogEntry {
            graph,
            aut: parsed.aut,
        });
    }
    entries.sort_by_key(|e| e.graph.canonical_form().0);
    Ok(GraphCatalog { signature, entries })
}

/// Wire form of a nodal graph. Roles are keyed "component:vertex", slot
/// lists "component:edge" with the edge's smaller half.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodalJson {
    pub components: Vec<GraphJson>,
    pub roles: BTreeMap<String, RoleJson>,
    pub slots: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleJson {
    Labeled(usize),
    Legal(usize),
}

impl NodalJson {
    pub fn from_nodal(n: &NodalGraph) -> Self {
        let mut roles = BTreeMap::new();
        let mut slots = BTreeMap::new();
        for (ci, comp) in n.components.iter().enumerate() {
            for (v, r) in &comp.roles {
                let key = format!("{ci}:{v}");
                roles.insert(
                    key,
                    match r {
                        PointRole::Labeled(j) => RoleJson::Labeled(*j),
                        PointRole::LegalNode(id) => RoleJson::Legal(*id),
                    },
                );
            }
            for (e, ids) in &comp.slots {
                slots.insert(format!("{ci}:{e}"), ids.clone());
            }
        }
        NodalJson {
            components: n.components.iter().map(|c| GraphJson::from_graph(&c.graph)).collect(),
            roles,
            slots,
        }
    }

    pub fn to_nodal(&self) -> Result<NodalGraph, IoError> {
        let mut components: Vec<NodalComponent> = self
            .components
            .iter()
            .map(|g| {
                Ok(NodalComponent {
                    graph: g.to_graph()?,
                    roles: BTreeMap::new(),
                    slots: BTreeMap::new(),
                })
            })
            .collect::<Result<_, IoError>>()?;
        let parse_key = |key: &str| -> Result<(usize, usize), IoError> {
            let (a, b) = key
                .split_once(':')
                .ok_or_else(|| IoError::BadKey(key.to_string()))?;
            Ok((
                a.parse().map_err(|_| IoError::BadKey(key.to_string()))?,
                b.parse().map_err(|_| IoError::BadKey(key.to_string()))?,
            ))
        };
        for (key, role) in &self.roles {
            let (ci, v) = parse_key(key)?;
            if ci >= components.len() {
                return Err(IoError::BadKey(key.clone()));
            }
            components[ci].roles.insert(
                v,
                match role {
                    RoleJson::Labeled(j) => PointRole::Labeled(*j),
                    RoleJson::Legal(id) => PointRole::LegalNode(*id),
                },
            );
        }
        for (key, ids) in &self.slots {
            let (ci, e) = parse_key(key)?;
            if ci >= components.len() {
                return Err(IoError::BadKey(key.clone()));
            }
            components[ci].slots.insert(e, ids.clone());
        }
        Ok(NodalGraph { components })
    }
}

/// Atomic file write: temp in the same directory, then rename.
pub fn write_atomically(path: &Path, contents: &str) -> Result<(), IoError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("cache"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn version_header() -> String {
    format!(
        "# openribbon-catalog schema={} crate={}\n",
        SCHEMA_VERSION,
        env!("CARGO_PKG_VERSION")
    )
}

fn signature_stem(signature: &Signature) -> String {
    match signature {
        Signature::Open { g, k, l, odd } => format!(
            "open-v{}-{}-g{g}k{k}l{l}{}",
            SCHEMA_VERSION,
            env!("CARGO_PKG_VERSION"),
            if *odd { "-odd" } else { "" }
        ),
        Signature::Closed { g, n } => format!(
            "closed-v{}-{}-g{g}n{n}",
            SCHEMA_VERSION,
            env!("CARGO_PKG_VERSION")
        ),
    }
}

/// Disk-backed catalog store. Stale versions never load: the key embeds
/// both the schema and the crate version.
#[derive(Clone, Debug)]
pub struct CatalogCache {
    pub dir: PathBuf,
}

impl CatalogCache {
    pub fn new(dir: PathBuf) -> Self {
        CatalogCache { dir }
    }

    fn path(&self, signature: &Signature) -> PathBuf {
        self.dir.join(format!("{}.jsonl", signature_stem(signature)))
    }

    pub fn load(&self, signature: Signature) -> Option<GraphCatalog> {
        let path = self.path(&signature);
        let text = fs::read_to_string(path).ok()?;
        let (header, body) = text.split_once('\n')?;
        if format!("{header}\n") != version_header() {
            return None;
        }
        catalog_from_jsonl(signature, body).ok()
    }

    pub fn store(&self, catalog: &GraphCatalog) -> Result<(), IoError> {
        let mut contents = version_header();
        contents.push_str(&catalog_to_jsonl(catalog));
        write_atomically(&self.path(&catalog.signature), &contents)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_open_trivalent, EnumLimits};

    #[test]
    fn graph_json_round_trip() {
        let lim = EnumLimits::default();
        for (g, k, l) in [(0, 3, 0), (0, 1, 1), (0, 1, 2)] {
            let cat = enumerate_open_trivalent(g, k, l, &lim).unwrap();
            for e in &cat.entries {
                let json = GraphJson::from_graph(&e.graph);
                let back = json.to_graph().unwrap();
                assert_eq!(back.canonical_form().0, e.graph.canonical_form().0);
                assert_eq!(back.is_ghost(), e.graph.is_ghost());
            }
        }
    }

    #[test]
    fn catalog_jsonl_round_trip() {
        let lim = EnumLimits::default();
        let cat = enumerate_open_trivalent(0, 5, 1, &lim).unwrap();
        let text = catalog_to_jsonl(&cat);
        let back = catalog_from_jsonl(cat.signature, &text).unwrap();
        assert_eq!(back.len(), cat.len());
        for (a, b) in back.entries.iter().zip(&cat.entries) {
            assert_eq!(a.graph.canonical_form().0, b.graph.canonical_form().0);
            assert_eq!(a.aut, b.aut);
        }
    }

    #[test]
    fn cache_round_trip_and_version_guard() {
        let dir = std::env::temp_dir().join(format!("openribbon-cache-test-{}", std::process::id()));
        let cache = CatalogCache::new(dir.clone());
        let lim = EnumLimits::default();
        let cat = enumerate_open_trivalent(0, 1, 2, &lim).unwrap();
        cache.store(&cat).unwrap();
        let loaded = cache.load(cat.signature).unwrap();
        assert_eq!(loaded.len(), cat.len());
        // corrupt the header: the entry must be ignored
        let path = dir.join(format!("{}.jsonl", super::signature_stem(&cat.signature)));
        let mangled = fs::read_to_string(&path)
            .unwrap()
            .replace("schema=", "schema=999");
        fs::write(&path, mangled).unwrap();
        assert!(cache.load(cat.signature).is_none());
        let _ = fs::remove_dir_all(dir);
    }
}
