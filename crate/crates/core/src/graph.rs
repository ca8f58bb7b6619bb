//! Mixed graphs: directed, bidirected, and undirected edges over named vertices.
//!
//! A [`MixedGraph`] is the universal representation for every graph class in
//! the hierarchy (DAG, UG, BG, ADMG, CG, SG). Vertices are identified by
//! name and stored sorted; bidirected and undirected pairs are canonicalized
//! at construction so that `{a,b}` and `{b,a}` denote the same edge. All
//! query operations are pure and deterministic: wherever a set must be
//! ordered, ties break lexicographically by vertex name.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of vertex names, ordered lexicographically.
pub type VertexSet = BTreeSet<String>;

/// Builds a [`VertexSet`] from anything yielding string-likes.
pub fn vset<I, S>(items: I) -> VertexSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

/// Graph classes of the inheritance hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphClass {
    /// Directed acyclic graph: directed edges only, acyclic.
    Dag,
    /// Undirected graph: undirected edges only.
    Ug,
    /// Bidirected graph: bidirected edges only.
    Bg,
    /// Acyclic directed mixed graph: directed + bidirected, directed part acyclic.
    Admg,
    /// Chain graph: directed + undirected, no partially directed cycle.
    Cg,
    /// Segregated graph: all three edge types, no partially directed cycle,
    /// no vertex incident to both a bidirected and an undirected edge.
    Sg,
    /// No structural restriction.
    Generic,
}

impl GraphClass {
    pub fn name(&self) -> &'static str {
        match self {
            GraphClass::Dag => "dag",
            GraphClass::Ug => "ug",
            GraphClass::Bg => "bg",
            GraphClass::Admg => "admg",
            GraphClass::Cg => "cg",
            GraphClass::Sg => "sg",
            GraphClass::Generic => "generic",
        }
    }
}

impl std::str::FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dag" => Ok(GraphClass::Dag),
            "ug" => Ok(GraphClass::Ug),
            "bg" => Ok(GraphClass::Bg),
            "admg" => Ok(GraphClass::Admg),
            "cg" => Ok(GraphClass::Cg),
            "sg" => Ok(GraphClass::Sg),
            "generic" => Ok(GraphClass::Generic),
            other => Err(Error::InvalidQuery(format!("unknown graph class `{other}`"))),
        }
    }
}

/// Genealogical query kinds accepted by [`MixedGraph::genealogical_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genealogy {
    Parents,
    Children,
    /// Reflexive-transitive closure over reversed directed edges.
    Ancestors,
    /// Reflexive-transitive closure over directed edges.
    Descendants,
    /// Bidirected neighbors (non-reflexive).
    Siblings,
    /// Union of bidirected-connected components (reflexive).
    District,
}

/// Orientation for DOT rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDir {
    TopBottom,
    LeftRight,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    vertices: Vec<String>,
    #[serde(default)]
    di_edges: Vec<(String, String)>,
    #[serde(default)]
    bi_edges: Vec<(String, String)>,
    #[serde(default)]
    ud_edges: Vec<(String, String)>,
}

/// A mixed graph over named vertices.
///
/// Vertices keep their construction order; bidirected and undirected pairs
/// are canonicalized to that order, so `{a,b}` and `{b,a}` are one edge.
/// Immutable after construction; all operations are pure functions, so a
/// graph may be shared freely across threads. Algorithmic tie-breaks
/// (topological order, greedy fixing, output listings) are lexicographic by
/// vertex name regardless of construction order.
#[derive(Debug, Clone)]
pub struct MixedGraph {
    /// Vertex names in construction order; index positions are used
    /// internally.
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    /// Vertex indices sorted by name.
    lex: Vec<usize>,
    /// Directed edges (parent, child) by index.
    di: BTreeSet<(usize, usize)>,
    /// Bidirected edges, canonicalized to (min, max) by index.
    bi: BTreeSet<(usize, usize)>,
    /// Undirected edges, canonicalized to (min, max) by index.
    ud: BTreeSet<(usize, usize)>,
}

impl PartialEq for MixedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.di == other.di
            && self.bi == other.bi
            && self.ud == other.ud
    }
}

// Same vertex list implies the same index mapping, so comparing index sets
// is sound.

impl Eq for MixedGraph {}

impl MixedGraph {
    /// Builds a graph from vertex names and edge lists.
    ///
    /// Endpoints must be declared vertices, self-loops and duplicate edges
    /// are rejected, and bidirected/undirected pairs are stored
    /// orientation-free.
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        di_edges: &[(S, S)],
        bi_edges: &[(S, S)],
        ud_edges: &[(S, S)],
    ) -> Result<Self> {
        let mut names: Vec<String> = Vec::with_capacity(vertices.len());
        for v in vertices {
            let v = v.as_ref();
            if v.is_empty() {
                return Err(Error::InvalidGraph("empty vertex name".into()));
            }
            names.push(v.to_string());
        }
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        if index.len() != names.len() {
            return Err(Error::InvalidGraph("duplicate vertex name".into()));
        }
        let mut lex: Vec<usize> = (0..names.len()).collect();
        lex.sort_by(|&a, &b| names[a].cmp(&names[b]));

        let lookup = |name: &str| -> Result<usize> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(name.to_string()))
        };

        let mut di = BTreeSet::new();
        for (p, c) in di_edges {
            let (p, c) = (lookup(p.as_ref())?, lookup(c.as_ref())?);
            if p == c {
                return Err(Error::InvalidGraph(format!("self-loop on `{}`", names[p])));
            }
            if !di.insert((p, c)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate directed edge {} -> {}",
                    names[p], names[c]
                )));
            }
        }
        let canon = |edges: &[(S, S)], label: &str| -> Result<BTreeSet<(usize, usize)>> {
            let mut set = BTreeSet::new();
            for (a, b) in edges {
                let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
                if a == b {
                    return Err(Error::InvalidGraph(format!("self-loop on `{}`", names[a])));
                }
                let pair = (a.min(b), a.max(b));
                if !set.insert(pair) {
                    return Err(Error::InvalidGraph(format!(
                        "duplicate {label} edge {} - {}",
                        names[pair.0], names[pair.1]
                    )));
                }
            }
            Ok(set)
        };
        let bi = canon(bi_edges, "bidirected")?;
        let ud = canon(ud_edges, "undirected")?;

        Ok(MixedGraph { vertices: names, index, lex, di, bi, ud })
    }

    /// ADMG constructor: directed + bidirected edges, acyclic directed part.
    pub fn admg<S: AsRef<str>>(
        vertices: &[S],
        di_edges: &[(S, S)],
        bi_edges: &[(S, S)],
    ) -> Result<Self> {
        let g = Self::new(vertices, di_edges, bi_edges, &[])?;
        if !g.validate_class(GraphClass::Admg) {
            return Err(Error::WrongGraphClass(
                g.class_violations(GraphClass::Admg).join("; "),
            ));
        }
        Ok(g)
    }

    /// DAG constructor: directed edges only, acyclic.
    pub fn dag<S: AsRef<str>>(vertices: &[S], di_edges: &[(S, S)]) -> Result<Self> {
        let g = Self::new(vertices, di_edges, &[], &[])?;
        if !g.validate_class(GraphClass::Dag) {
            return Err(Error::WrongGraphClass(
                g.class_violations(GraphClass::Dag).join("; "),
            ));
        }
        Ok(g)
    }

    /// Undirected graph constructor.
    pub fn ug<S: AsRef<str>>(vertices: &[S], ud_edges: &[(S, S)]) -> Result<Self> {
        Self::new(vertices, &[], &[], ud_edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Vertex names in construction order.
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Vertex names sorted lexicographically.
    pub fn sorted_vertices(&self) -> Vec<String> {
        self.lex.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Vertex indices in lexicographic name order.
    pub(crate) fn lex_idxs(&self) -> &[usize] {
        &self.lex
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().cloned().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub(crate) fn idx(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub(crate) fn name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    fn named_edges(&self, edges: &BTreeSet<(usize, usize)>) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (self.vertices[a].clone(), self.vertices[b].clone()))
            .collect();
        out.sort();
        out
    }

    /// Directed edges as (parent, child) name pairs, sorted by name.
    pub fn di_edges(&self) -> Vec<(String, String)> {
        self.named_edges(&self.di)
    }

    /// Bidirected edges as canonical name pairs, sorted by name.
    pub fn bi_edges(&self) -> Vec<(String, String)> {
        self.named_edges(&self.bi)
    }

    /// Undirected edges as canonical name pairs, sorted by name.
    pub fn ud_edges(&self) -> Vec<(String, String)> {
        self.named_edges(&self.ud)
    }

    pub fn has_di_edge(&self, parent: &str, child: &str) -> bool {
        match (self.index.get(parent), self.index.get(child)) {
            (Some(&p), Some(&c)) => self.di.contains(&(p, c)),
            _ => false,
        }
    }

    pub fn has_bi_edge(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&a), Some(&b)) => self.bi.contains(&(a.min(b), a.max(b))),
            _ => false,
        }
    }

    pub fn has_ud_edge(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&a), Some(&b)) => self.ud.contains(&(a.min(b), a.max(b))),
            _ => false,
        }
    }

    pub(crate) fn parent_idxs(&self, v: usize) -> Vec<usize> {
        self.di.iter().filter(|&&(_, c)| c == v).map(|&(p, _)| p).collect()
    }

    pub(crate) fn child_idxs(&self, v: usize) -> Vec<usize> {
        self.di.iter().filter(|&&(p, _)| p == v).map(|&(_, c)| c).collect()
    }

    pub(crate) fn sibling_idxs(&self, v: usize) -> Vec<usize> {
        self.bi
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub(crate) fn ud_neighbor_idxs(&self, v: usize) -> Vec<usize> {
        self.ud
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn to_idx_set(&self, s: &VertexSet) -> Result<BTreeSet<usize>> {
        s.iter().map(|v| self.idx(v)).collect()
    }

    fn to_name_set(&self, s: &BTreeSet<usize>) -> VertexSet {
        s.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Genealogical set of `s`: parents, children, ancestors, descendants,
    /// siblings, or district. Ancestors, descendants, and district are
    /// reflexive (each vertex belongs to its own closure); parents, children,
    /// and siblings are not.
    pub fn genealogical_set(&self, kind: Genealogy, s: &VertexSet) -> Result<VertexSet> {
        match kind {
            Genealogy::Parents => self.parents(s),
            Genealogy::Children => self.children(s),
            Genealogy::Ancestors => self.ancestors(s),
            Genealogy::Descendants => self.descendants(s),
            Genealogy::Siblings => self.siblings(s),
            Genealogy::District => self.district(s),
        }
    }

    pub fn parents(&self, s: &VertexSet) -> Result<VertexSet> {
        let idxs = self.to_idx_set(s)?;
        let mut out = BTreeSet::new();
        for &(p, c) in &self.di {
            if idxs.contains(&c) {
                out.insert(p);
            }
        }
        Ok(self.to_name_set(&out))
    }

    pub fn children(&self, s: &VertexSet) -> Result<VertexSet> {
        let idxs = self.to_idx_set(s)?;
        let mut out = BTreeSet::new();
        for &(p, c) in &self.di {
            if idxs.contains(&p) {
                out.insert(c);
            }
        }
        Ok(self.to_name_set(&out))
    }

    /// Reflexive ancestors: `s` plus everything with a directed path into `s`.
    pub fn ancestors(&self, s: &VertexSet) -> Result<VertexSet> {
        let seed = self.to_idx_set(s)?;
        Ok(self.to_name_set(&self.closure(&seed, |v| self.parent_idxs(v))))
    }

    /// Reflexive descendants: `s` plus everything reachable by directed paths.
    pub fn descendants(&self, s: &VertexSet) -> Result<VertexSet> {
        let seed = self.to_idx_set(s)?;
        Ok(self.to_name_set(&self.closure(&seed, |v| self.child_idxs(v))))
    }

    /// Bidirected neighbors of `s`, excluding `s` members unless connected.
    pub fn siblings(&self, s: &VertexSet) -> Result<VertexSet> {
        let idxs = self.to_idx_set(s)?;
        let mut out = BTreeSet::new();
        for &v in &idxs {
            out.extend(self.sibling_idxs(v));
        }
        Ok(self.to_name_set(&out))
    }

    /// Union of the bidirected-connected components containing members of `s`
    /// (reflexive).
    pub fn district(&self, s: &VertexSet) -> Result<VertexSet> {
        let seed = self.to_idx_set(s)?;
        Ok(self.to_name_set(&self.closure(&seed, |v| self.sibling_idxs(v))))
    }

    fn closure<F>(&self, seed: &BTreeSet<usize>, next: F) -> BTreeSet<usize>
    where
        F: Fn(usize) -> Vec<usize>,
    {
        let mut seen: BTreeSet<usize> = seed.clone();
        let mut queue: VecDeque<usize> = seed.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for w in next(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Partition of the vertices into maximal bidirected-connected components,
    /// ordered by lexicographically smallest member.
    pub fn districts(&self) -> Vec<VertexSet> {
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for &v in &self.lex {
            if seen[v] {
                continue;
            }
            let comp = self.closure(&BTreeSet::from([v]), |u| self.sibling_idxs(u));
            for &u in &comp {
                seen[u] = true;
            }
            out.push(self.to_name_set(&comp));
        }
        out
    }

    /// Induced subgraph on `s`: keeps every edge with both endpoints in `s`,
    /// and the parent graph's vertex order.
    pub fn subgraph(&self, s: &VertexSet) -> Result<MixedGraph> {
        let keep = self.to_idx_set(s)?;
        let filter = |edges: &BTreeSet<(usize, usize)>| -> Vec<(String, String)> {
            edges
                .iter()
                .filter(|&&(a, b)| keep.contains(&a) && keep.contains(&b))
                .map(|&(a, b)| (self.vertices[a].clone(), self.vertices[b].clone()))
                .collect()
        };
        let vs: Vec<String> = self
            .vertices
            .iter()
            .filter(|v| s.contains(*v))
            .cloned()
            .collect();
        MixedGraph::new(&vs, &filter(&self.di), &filter(&self.bi), &filter(&self.ud))
    }

    /// True iff the directed part has no cycle.
    pub fn directed_part_acyclic(&self) -> bool {
        self.topological_order_idx().is_some()
    }

    fn topological_order_idx(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut in_deg = vec![0usize; n];
        for &(_, c) in &self.di {
            in_deg[c] += 1;
        }
        // Ready set keyed by lexicographic rank for deterministic tie-breaks.
        let mut rank = vec![0usize; n];
        for (r, &v) in self.lex.iter().enumerate() {
            rank[v] = r;
        }
        let mut ready: BTreeSet<(usize, usize)> = (0..n)
            .filter(|&v| in_deg[v] == 0)
            .map(|v| (rank[v], v))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&(r, v)) = ready.iter().next() {
            ready.remove(&(r, v));
            order.push(v);
            for c in self.child_idxs(v) {
                in_deg[c] -= 1;
                if in_deg[c] == 0 {
                    ready.insert((rank[c], c));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Deterministic topological order of the directed part; lexicographic
    /// tie-break. Errors if the directed part has a cycle.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        self.topological_order_idx()
            .map(|o| o.into_iter().map(|i| self.vertices[i].clone()).collect())
            .ok_or(Error::CyclicGraph)
    }

    /// True iff there is a partially directed cycle: a cycle over directed
    /// and undirected edges that uses at least one directed edge, with all
    /// directed edges pointing the same way around it. Detected by checking
    /// for a directed edge inside a strongly connected component of the
    /// digraph where undirected edges run both ways.
    fn has_partially_directed_cycle(&self) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(p, c) in &self.di {
            adj[p].push(c);
        }
        for &(a, b) in &self.ud {
            adj[a].push(b);
            adj[b].push(a);
        }
        let comp = strongly_connected_components(&adj);
        self.di.iter().any(|&(p, c)| comp[p] == comp[c])
    }

    /// Class-validity predicate. `Generic` is always true.
    pub fn validate_class(&self, class: GraphClass) -> bool {
        self.class_violations(class).is_empty()
    }

    /// Human-readable list of invariants of `class` violated by this graph.
    pub fn class_violations(&self, class: GraphClass) -> Vec<String> {
        let mut v = Vec::new();
        let no_di = || format!("{} directed edge(s) present", self.di.len());
        let no_bi = || format!("{} bidirected edge(s) present", self.bi.len());
        let no_ud = || format!("{} undirected edge(s) present", self.ud.len());
        match class {
            GraphClass::Generic => {}
            GraphClass::Dag => {
                if !self.bi.is_empty() {
                    v.push(no_bi());
                }
                if !self.ud.is_empty() {
                    v.push(no_ud());
                }
                if !self.directed_part_acyclic() {
                    v.push("directed part contains a cycle".into());
                }
            }
            GraphClass::Ug => {
                if !self.di.is_empty() {
                    v.push(no_di());
                }
                if !self.bi.is_empty() {
                    v.push(no_bi());
                }
            }
            GraphClass::Bg => {
                if !self.di.is_empty() {
                    v.push(no_di());
                }
                if !self.ud.is_empty() {
                    v.push(no_ud());
                }
            }
            GraphClass::Admg => {
                if !self.ud.is_empty() {
                    v.push(no_ud());
                }
                if !self.directed_part_acyclic() {
                    v.push("directed part contains a cycle".into());
                }
            }
            GraphClass::Cg => {
                if !self.bi.is_empty() {
                    v.push(no_bi());
                }
                if self.has_partially_directed_cycle() {
                    v.push("partially directed cycle present".into());
                }
            }
            GraphClass::Sg => {
                if self.has_partially_directed_cycle() {
                    v.push("partially directed cycle present".into());
                }
                for i in 0..self.vertices.len() {
                    if !self.sibling_idxs(i).is_empty() && !self.ud_neighbor_idxs(i).is_empty() {
                        v.push(format!(
                            "vertex `{}` incident to both bidirected and undirected edges",
                            self.vertices[i]
                        ));
                    }
                }
            }
        }
        v
    }

    /// DOT rendering. Bidirected edges carry `[dir=both]`, undirected edges
    /// `[dir=none]`; vertices and edges are listed in lexicographic order,
    /// so output is byte-deterministic.
    pub fn to_dot(&self, direction: RankDir) -> String {
        let mut out = String::from("digraph {\n");
        out.push_str(match direction {
            RankDir::TopBottom => "  rankdir=TB;\n",
            RankDir::LeftRight => "  rankdir=LR;\n",
        });
        for &i in &self.lex {
            out.push_str(&format!("  {};\n", self.vertices[i]));
        }
        for (p, c) in self.di_edges() {
            out.push_str(&format!("  {p} -> {c};\n"));
        }
        for (a, b) in self.bi_edges() {
            out.push_str(&format!("  {a} -> {b} [dir=both];\n"));
        }
        for (a, b) in self.ud_edges() {
            out.push_str(&format!("  {a} -> {b} [dir=none];\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Serializes to the graph JSON format:
    /// `{"vertices": [...], "di_edges": [[p,c],...], "bi_edges": ..., "ud_edges": ...}`.
    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            vertices: self.vertices.clone(),
            di_edges: self.di_edges(),
            bi_edges: self.bi_edges(),
            ud_edges: self.ud_edges(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serialization is infallible")
    }

    /// Parses the graph JSON format. Absent edge keys mean empty; unknown
    /// keys are rejected.
    pub fn from_json(text: &str) -> Result<MixedGraph> {
        let doc: GraphJson = serde_json::from_str(text)?;
        MixedGraph::new(&doc.vertices, &doc.di_edges, &doc.bi_edges, &doc.ud_edges)
    }
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MixedGraph({} vertices, {} di, {} bi, {} ud)",
            self.vertices.len(),
            self.di.len(),
            self.bi.len(),
            self.ud.len()
        )
    }
}

/// Tarjan strongly connected components; returns a component id per vertex.
fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut ids = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut num = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0usize;
    let mut comp_count = 0usize;

    // Iterative Tarjan to avoid recursion limits on larger graphs.
    for start in 0..n {
        if num[start] != usize::MAX {
            continue;
        }
        let mut call_stack: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut edge_pos)) = call_stack.last_mut() {
            if *edge_pos == 0 {
                num[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *edge_pos < adj[v].len() {
                let w = adj[v][*edge_pos];
                *edge_pos += 1;
                if num[w] == usize::MAX {
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(num[w]);
                }
            } else {
                if low[v] == num[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        ids[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
                call_stack.pop();
                if let Some(&mut (u, _)) = call_stack.last_mut() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }
    ids
}
