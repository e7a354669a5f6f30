//! Exhaustive generation of centered tiling graphs and the operation index.
//!
//! Graphs are grown from the root leaf. Slots are visited in the order the
//! canonical form reads them (vertices in discovery order, each from its
//! `in-1` slot), and every free slot is either left as a leaf, joined to the
//! one compatible slot of an already discovered vertex, or joined to a new
//! vertex. Each rooted isomorphism class is therefore produced exactly once.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraContext, BasisPath, Vertex};
use crate::tiling::{slot_kind, CanonicalKey, Direction, TilingGraph};
use crate::weight::WeightVector;

pub const INDEX_FORMAT_VERSION: u32 = 1;

/// Largest graph the enumerator will attempt, counted in internal half-edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_half_edges: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_half_edges: 24 }
    }
}

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("m = {0} is not supported (need m >= 3)")]
    UnsupportedParameter(usize),
    #[error("d must be at least 1")]
    ZeroVertices,
    #[error("budget exceeded: (m, d) = ({m}, {d}) needs {half_edges} half-edges, cap is {cap}")]
    Budget {
        m: usize,
        d: usize,
        half_edges: usize,
        cap: usize,
    },
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("index format version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("index header is (m, d_max) = ({found_m}, {found_d}), expected ({want_m}, {want_d})")]
    HeaderMismatch {
        found_m: usize,
        found_d: usize,
        want_m: usize,
        want_d: usize,
    },
    #[error("corrupt index file: {0}")]
    Corrupt(String),
}

const FREE: u32 = u32::MAX;
const LEAF: u32 = u32::MAX - 1;

struct Search {
    m: usize,
    d: usize,
    deg: usize,
    partner: Vec<u32>,
    count: usize,
    /// `reach[v]` has bit `u` when a directed path of non-loop edges runs from `v` to `u`.
    reach: Vec<u64>,
    root_slot: usize,
    found: Vec<TilingGraph>,
}

impl Search {
    fn run(&mut self, p: usize) {
        let v = p / self.deg;
        if v >= self.count {
            if self.count == self.d {
                self.finish();
            }
            return;
        }
        if self.partner[p] != FREE {
            return self.run(p + 1);
        }
        let s = p % self.deg;
        let mate_slot = 2 * self.m - 3 - s;
        let outgoing = slot_kind(self.m, s).0 == Direction::Out;

        self.partner[p] = LEAF;
        self.run(p + 1);

        for u in v..self.count {
            let q = u * self.deg + mate_slot;
            if self.partner[q] == FREE && q > p {
                self.join(p, q, v, u, outgoing);
            }
        }
        if self.count < self.d {
            let u = self.count;
            self.count += 1;
            self.join(p, u * self.deg + mate_slot, v, u, outgoing);
            self.count -= 1;
        }
        self.partner[p] = FREE;
    }

    fn join(&mut self, p: usize, q: usize, v: usize, u: usize, outgoing: bool) {
        let saved = if v != u {
            let (a, b) = if outgoing { (v, u) } else { (u, v) };
            if self.reach[b] >> a & 1 == 1 {
                return;
            }
            let saved = self.reach.clone();
            let add = self.reach[b] | 1 << b;
            for x in 0..self.count {
                if x == a || self.reach[x] >> a & 1 == 1 {
                    self.reach[x] |= add;
                }
            }
            Some(saved)
        } else {
            None
        };
        self.partner[p] = q as u32;
        self.partner[q] = p as u32;
        self.run(p + 1);
        self.partner[q] = FREE;
        self.partner[p] = FREE;
        if let Some(saved) = saved {
            self.reach = saved;
        }
    }

    fn finish(&mut self) {
        let mut joins = Vec::new();
        for (h, &q) in self.partner.iter().enumerate() {
            if q < LEAF && (q as usize) > h {
                let q = q as usize;
                joins.push(((h / self.deg, h % self.deg), (q / self.deg, q % self.deg)));
            }
        }
        let g = TilingGraph::from_slots(self.m, self.d, &joins, (0, self.root_slot))
            .expect("search only joins compatible free slots");
        if g.validate().is_valid() {
            self.found.push(g);
        }
    }
}

/// All centered tiling graphs with exactly `d` internal vertices, one per
/// rooted isomorphism class, sorted by canonical key.
pub fn enumerate_centered(
    m: usize,
    d: usize,
    budget: Budget,
) -> Result<Vec<TilingGraph>, EnumerationError> {
    if m < 3 {
        return Err(EnumerationError::UnsupportedParameter(m));
    }
    if d == 0 {
        return Err(EnumerationError::ZeroVertices);
    }
    let deg = 2 * m - 2;
    let half_edges = d.saturating_mul(deg);
    if half_edges > budget.max_half_edges || d > 64 {
        return Err(EnumerationError::Budget {
            m,
            d,
            half_edges,
            cap: budget.max_half_edges,
        });
    }
    let per_root: Vec<Vec<TilingGraph>> = (0..deg)
        .into_par_iter()
        .map(|root_slot| {
            let mut search = Search {
                m,
                d,
                deg,
                partner: vec![FREE; d * deg],
                count: 1,
                reach: vec![0; d],
                root_slot,
                found: Vec::new(),
            };
            search.partner[root_slot] = LEAF;
            search.run(0);
            search.found
        })
        .collect();
    let mut by_key = BTreeMap::new();
    for g in per_root.into_iter().flatten() {
        let key = g.canonical_form();
        let previous = by_key.insert(key, g);
        debug_assert!(previous.is_none(), "canonical growth produced a duplicate");
    }
    Ok(by_key.into_values().collect())
}

/// One contribution `multiplicity * t^d * I_idempotent` to a structure constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub idempotent: Vertex,
    pub d: usize,
    pub multiplicity: u64,
    pub graphs: Vec<CanonicalKey>,
}

pub type IndexKey = (Vec<BasisPath>, WeightVector);

/// Centered structure constants for all graphs with at most `d_max` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationIndex {
    m: usize,
    d_max: usize,
    entries: BTreeMap<IndexKey, Vec<IndexEntry>>,
}

#[derive(Serialize, Deserialize)]
struct IndexDocument {
    format_version: u32,
    m: usize,
    d_max: usize,
    entries: Vec<EntryDocument>,
}

#[derive(Serialize, Deserialize)]
struct EntryDocument {
    inputs: Vec<String>,
    weight: WeightVector,
    outputs: Vec<OutputDocument>,
}

#[derive(Serialize, Deserialize)]
struct OutputDocument {
    idempotent: Vertex,
    d: usize,
    multiplicity: u64,
    graphs: Vec<CanonicalKey>,
}

impl OperationIndex {
    /// An index with no entries; every query needing a graph is out of budget.
    pub fn empty(m: usize) -> Self {
        OperationIndex {
            m,
            d_max: 0,
            entries: BTreeMap::new(),
        }
    }

    pub fn build(m: usize, d_max: usize) -> Result<Self, IndexError> {
        Self::build_with_budget(m, d_max, Budget::default())
    }

    pub fn build_with_budget(m: usize, d_max: usize, budget: Budget) -> Result<Self, IndexError> {
        if m < 3 {
            return Err(EnumerationError::UnsupportedParameter(m).into());
        }
        let mut index = OperationIndex::empty(m);
        index.d_max = d_max;
        for d in 1..=d_max {
            for g in enumerate_centered(m, d, budget)? {
                index.insert(&g);
            }
        }
        Ok(index)
    }

    fn insert(&mut self, g: &TilingGraph) {
        let seq = g
            .algebra_sequence()
            .expect("enumerated graphs are valid and read as nonzero paths");
        let outputs = self.entries.entry((seq.inputs, seq.weight)).or_default();
        let key = g.canonical_form();
        match outputs
            .iter_mut()
            .find(|e| e.idempotent == seq.idempotent && e.d == seq.d)
        {
            Some(e) => {
                e.multiplicity += 1;
                e.graphs.push(key);
                e.graphs.sort();
            }
            None => {
                outputs.push(IndexEntry {
                    idempotent: seq.idempotent,
                    d: seq.d,
                    multiplicity: 1,
                    graphs: vec![key],
                });
                outputs.sort_by_key(|e| (e.idempotent, e.d));
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Number of distinct keys.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of graphs counted with multiplicity.
    pub fn graph_count(&self) -> u64 {
        self.entries
            .values()
            .flatten()
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IndexKey, &[IndexEntry])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn lookup(&self, inputs: &[BasisPath], weight: &WeightVector) -> &[IndexEntry] {
        // The map is keyed by owned vectors, so build the probe once.
        self.entries
            .get(&(inputs.to_vec(), weight.clone()))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn to_json_string(&self) -> String {
        let doc = IndexDocument {
            format_version: INDEX_FORMAT_VERSION,
            m: self.m,
            d_max: self.d_max,
            entries: self
                .entries
                .iter()
                .map(|((inputs, weight), outputs)| EntryDocument {
                    inputs: inputs.iter().map(|p| p.to_string()).collect(),
                    weight: weight.clone(),
                    outputs: outputs
                        .iter()
                        .map(|e| OutputDocument {
                            idempotent: e.idempotent,
                            d: e.d,
                            multiplicity: e.multiplicity,
                            graphs: e.graphs.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string(&doc).expect("index documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Self, IndexError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| IndexError::Corrupt(e.to_string()))?;
        let found = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| IndexError::Corrupt("missing format_version".into()))?;
        if found != u64::from(INDEX_FORMAT_VERSION) {
            return Err(IndexError::VersionMismatch {
                found: found as u32,
                expected: INDEX_FORMAT_VERSION,
            });
        }
        let doc: IndexDocument =
            serde_json::from_value(value).map_err(|e| IndexError::Corrupt(e.to_string()))?;
        let ctx = AlgebraContext::new(doc.m).map_err(|e| IndexError::Corrupt(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for entry in doc.entries {
            if entry.weight.m() != doc.m {
                return Err(IndexError::Corrupt(format!(
                    "weight {} has the wrong length",
                    entry.weight
                )));
            }
            let inputs = entry
                .inputs
                .iter()
                .map(|s| ctx.parse_path(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| IndexError::Corrupt(e.to_string()))?;
            let outputs: Vec<IndexEntry> = entry
                .outputs
                .into_iter()
                .map(|o| IndexEntry {
                    idempotent: o.idempotent,
                    d: o.d,
                    multiplicity: o.multiplicity,
                    graphs: o.graphs,
                })
                .collect();
            if let Some(bad) = outputs.iter().find(|o| o.d == 0 || o.d > doc.d_max) {
                return Err(IndexError::Corrupt(format!(
                    "entry with d = {} outside 1..={}",
                    bad.d, doc.d_max
                )));
            }
            if entries.insert((inputs, entry.weight), outputs).is_some() {
                return Err(IndexError::Corrupt("duplicate key".into()));
            }
        }
        Ok(OperationIndex {
            m: doc.m,
            d_max: doc.d_max,
            entries,
        })
    }

    pub fn store(&self, path: &Path) -> Result<(), IndexError> {
        fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    /// Loads an index and checks its header against the expected parameters.
    pub fn load_expecting(path: &Path, m: usize, d_max: usize) -> Result<Self, IndexError> {
        let index = Self::load(path)?;
        if index.m != m || index.d_max != d_max {
            return Err(IndexError::HeaderMismatch {
                found_m: index.m,
                found_d: index.d_max,
                want_m: m,
                want_d: d_max,
            });
        }
        Ok(index)
    }

    /// Default cache file name for the given parameters.
    pub fn cache_file_name(m: usize, d_max: usize) -> String {
        format!("index-m{m}-d{d_max}-v{INDEX_FORMAT_VERSION}.json")
    }

    /// Loads the cached index from `dir`, building and storing it when absent
    /// or unreadable.
    pub fn load_or_build(dir: &Path, m: usize, d_max: usize) -> Result<Self, IndexError> {
        let path = dir.join(Self::cache_file_name(m, d_max));
        if path.exists() {
            if let Ok(index) = Self::load_expecting(&path, m, d_max) {
                return Ok(index);
            }
        }
        let index = Self::build(m, d_max)?;
        fs::create_dir_all(dir)?;
        index.store(&path)?;
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_censuses() {
        let count = |m, d| enumerate_centered(m, d, Budget::default()).unwrap().len();
        assert_eq!(count(3, 1), 8);
        assert_eq!(count(4, 1), 20);
        assert_eq!(count(3, 2), 36);
    }

    #[test]
    fn enumerated_graphs_are_valid_and_distinct() {
        let graphs = enumerate_centered(4, 2, Budget::default()).unwrap();
        let mut keys: Vec<_> = graphs.iter().map(|g| g.canonical_form()).collect();
        assert!(graphs.iter().all(|g| g.validate().is_valid()));
        keys.dedup();
        assert_eq!(keys.len(), graphs.len());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_centered(4, 99, Budget::default()),
            Err(EnumerationError::Budget { .. })
        ));
        assert!(matches!(
            enumerate_centered(4, 0, Budget::default()),
            Err(EnumerationError::ZeroVertices)
        ));
        assert!(matches!(
            enumerate_centered(4, 2, Budget { max_half_edges: 6 }),
            Err(EnumerationError::Budget { .. })
        ));
    }

    #[test]
    fn star_is_in_the_index() {
        let ctx = AlgebraContext::new(4).unwrap();
        let index = OperationIndex::build(4, 1).unwrap();
        let inputs: Vec<BasisPath> = ["U1", "R2", "R3", "U4", "L3", "L2"]
            .iter()
            .map(|s| ctx.parse_path(s).unwrap())
            .collect();
        let hits = index.lookup(&inputs, &WeightVector::zero(4));
        assert_eq!(hits.len(), 1);
        assert_eq!(
            (hits[0].idempotent, hits[0].d, hits[0].multiplicity),
            (1, 1, 1)
        );
    }

    #[test]
    fn index_has_no_odd_or_unary_keys() {
        let index = OperationIndex::build(4, 2).unwrap();
        for ((inputs, _), _) in index.entries() {
            assert_eq!(inputs.len() % 2, 0);
            assert!(inputs.len() >= 2);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let index = OperationIndex::build(3, 2).unwrap();
        let text = index.to_json_string();
        let back = OperationIndex::from_json_str(&text).unwrap();
        assert_eq!(back, index);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn bad_files_are_rejected() {
        let text = OperationIndex::build(3, 1).unwrap().to_json_string();
        assert!(matches!(
            OperationIndex::from_json_str(&text[..text.len() / 2]),
            Err(IndexError::Corrupt(_))
        ));
        let wrong = text.replacen("\"format_version\":1", "\"format_version\":7", 1);
        assert!(matches!(
            OperationIndex::from_json_str(&wrong),
            Err(IndexError::VersionMismatch { found: 7, .. })
        ));
    }
}
