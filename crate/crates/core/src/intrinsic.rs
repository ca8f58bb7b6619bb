//! Intrinsic sets of an ADMG: bidirected-connected vertex sets reachable by
//! a valid fixing sequence, with their heads and tails.
//!
//! Enumeration walks reachable vertex sets breadth-first, memoized by the set
//! of remaining random vertices. The reached CADMG is a function of that set
//! alone (fixing is confluent), so fixability can be checked on the induced
//! subgraph without replaying edge deletions. Worst case is exponential in
//! the vertex count; graphs at desk scale are fine.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexSet};

/// Largest vertex count accepted by the enumerator.
pub const MAX_CATALOG_VERTICES: usize = 25;

/// One intrinsic set: the set itself, its head and tail, and a witnessing
/// fixing order for the complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntrinsicEntry {
    pub set: VertexSet,
    pub head: VertexSet,
    pub tail: VertexSet,
    pub fixing_order: Vec<String>,
}

/// Catalog of all intrinsic sets of an ADMG, keyed by head.
#[derive(Debug, Clone)]
pub struct IntrinsicCatalog {
    by_head: BTreeMap<VertexSet, IntrinsicEntry>,
}

impl IntrinsicCatalog {
    pub fn get_by_head(&self, head: &VertexSet) -> Option<&IntrinsicEntry> {
        self.by_head.get(head)
    }

    /// Entries ordered by head.
    pub fn entries(&self) -> impl Iterator<Item = &IntrinsicEntry> {
        self.by_head.values()
    }

    pub fn len(&self) -> usize {
        self.by_head.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_head.is_empty()
    }
}

struct MaskGraph {
    n: usize,
    children: Vec<u64>,
    siblings: Vec<u64>,
    /// Vertex indices in lexicographic name order, for deterministic
    /// candidate iteration.
    lex: Vec<usize>,
}

impl MaskGraph {
    fn new(g: &MixedGraph) -> Result<Self> {
        let n = g.vertex_count();
        let mut children = vec![0u64; n];
        let mut siblings = vec![0u64; n];
        for (p, c) in g.di_edges() {
            children[g.idx(&p)?] |= 1 << g.idx(&c)?;
        }
        for (a, b) in g.bi_edges() {
            let (a, b) = (g.idx(&a)?, g.idx(&b)?);
            siblings[a] |= 1 << b;
            siblings[b] |= 1 << a;
        }
        Ok(MaskGraph { n, children, siblings, lex: g.lex_idxs().to_vec() })
    }

    /// Reflexive descendants of `v` within `mask`.
    fn descendants_in(&self, mask: u64, v: usize) -> u64 {
        let mut seen = 1u64 << v;
        let mut frontier = 1u64 << v;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let next = self.children[u] & mask & !seen;
            seen |= next;
            frontier |= next;
        }
        seen
    }

    /// Bidirected-connected component of `v` within `mask` (reflexive).
    fn district_in(&self, mask: u64, v: usize) -> u64 {
        let mut seen = 1u64 << v;
        let mut frontier = 1u64 << v;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let next = self.siblings[u] & mask & !seen;
            seen |= next;
            frontier |= next;
        }
        seen
    }

    fn fixable_in(&self, mask: u64, v: usize) -> bool {
        let bit = 1u64 << v;
        self.descendants_in(mask, v) & self.district_in(mask, v) == bit
    }

    /// True iff the vertices of `mask` form one bidirected-connected set.
    fn connected(&self, mask: u64) -> bool {
        if mask == 0 {
            return false;
        }
        let v = mask.trailing_zeros() as usize;
        self.district_in(mask, v) == mask
    }

    fn vertices_of(&self, mask: u64) -> Vec<usize> {
        (0..self.n).filter(|&v| mask & (1 << v) != 0).collect()
    }

    /// Vertices of `mask` in lexicographic name order.
    fn lex_vertices_of(&self, mask: u64) -> Vec<usize> {
        self.lex.iter().copied().filter(|&v| mask & (1 << v) != 0).collect()
    }
}

/// Enumerates every reachable vertex set of `g`, returning for each the
/// (deterministic) fixing order that reached it. Candidates are fixed in
/// lexicographic order, breadth-first from the full vertex set.
fn reachable_sets(g: &MixedGraph) -> Result<(MaskGraph, HashMap<u64, Vec<usize>>)> {
    if !g.validate_class(GraphClass::Admg) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Admg).join("; "),
        ));
    }
    if g.vertex_count() > MAX_CATALOG_VERTICES {
        return Err(Error::TooLarge(format!(
            "intrinsic-set enumeration is exponential; {} vertices exceeds the limit of {}",
            g.vertex_count(),
            MAX_CATALOG_VERTICES
        )));
    }
    let mg = MaskGraph::new(g)?;
    let full = if mg.n == 64 { u64::MAX } else { (1u64 << mg.n) - 1 };
    let mut orders: HashMap<u64, Vec<usize>> = HashMap::new();
    orders.insert(full, Vec::new());
    let mut queue = VecDeque::from([full]);
    while let Some(mask) = queue.pop_front() {
        for v in mg.lex_vertices_of(mask) {
            if !mg.fixable_in(mask, v) {
                continue;
            }
            let child = mask & !(1 << v);
            if !orders.contains_key(&child) {
                let mut order = orders[&mask].clone();
                order.push(v);
                orders.insert(child, order);
                queue.push_back(child);
            }
        }
    }
    Ok((mg, orders))
}

/// Builds the intrinsic catalog of an ADMG: every bidirected-connected
/// reachable set with its head, tail, and a witnessing fixing order.
pub fn intrinsic_catalog(g: &MixedGraph) -> Result<IntrinsicCatalog> {
    let (mg, orders) = reachable_sets(g)?;
    let mut by_head: BTreeMap<VertexSet, IntrinsicEntry> = BTreeMap::new();
    // Deterministic iteration: sort reached masks.
    let mut masks: Vec<u64> = orders.keys().copied().collect();
    masks.sort_unstable();
    for mask in masks {
        if mask == 0 || !mg.connected(mask) {
            continue;
        }
        let set: VertexSet = mg.vertices_of(mask).into_iter().map(|v| g.name(v).to_string()).collect();
        // Edges among surviving random vertices are untouched by fixing, so
        // heads and tails can be read from the original graph.
        let mut head = VertexSet::new();
        for v in mg.vertices_of(mask) {
            if mg.children[v] & mask == 0 {
                head.insert(g.name(v).to_string());
            }
        }
        let pa = g.parents(&set)?;
        let tail: VertexSet = set
            .difference(&head)
            .chain(pa.difference(&set))
            .cloned()
            .collect();
        let fixing_order: Vec<String> =
            orders[&mask].iter().map(|&v| g.name(v).to_string()).collect();
        let entry = IntrinsicEntry { set, head: head.clone(), tail, fixing_order };
        if let Some(existing) = by_head.insert(head, entry) {
            return Err(Error::Internal(format!(
                "two intrinsic sets share the head {{{}}}",
                existing.head.iter().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
    }
    Ok(IntrinsicCatalog { by_head })
}

/// Greedy reachability: a valid fixing order for `targets`' complement that
/// leaves exactly `keep` random, if one exists. Candidates are tried in
/// lexicographic order each round.
pub fn reach_set(g: &MixedGraph, keep: &VertexSet) -> Result<Option<Vec<String>>> {
    if !g.validate_class(GraphClass::Admg) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Admg).join("; "),
        ));
    }
    let mg = MaskGraph::new(g)?;
    let mut keep_mask = 0u64;
    for v in keep {
        keep_mask |= 1 << g.idx(v)?;
    }
    let full = if mg.n == 64 { u64::MAX } else { (1u64 << mg.n) - 1 };
    let mut mask = full;
    let mut order = Vec::new();
    while mask != keep_mask {
        let mut progressed = false;
        for v in mg.lex_vertices_of(mask & !keep_mask) {
            if mg.fixable_in(mask, v) {
                mask &= !(1 << v);
                order.push(g.name(v).to_string());
                progressed = true;
                break;
            }
        }
        if !progressed {
            return Ok(None);
        }
    }
    Ok(Some(order))
}
