//! m-separation on ADMGs and plain separation on undirected graphs.
//!
//! A path is m-connecting given `z` iff every non-collider on it lies outside
//! `z` and every collider is a (reflexive) ancestor of `z`. A vertex is a
//! collider on a path iff both incident path edges carry an arrowhead at it.
//! The implementation searches legal walks, which connect exactly when an
//! m-connecting path exists.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexSet};

/// A separation query: is `x` separated from `y` given `z`?
#[derive(Debug, Clone)]
pub struct SeparationQuery {
    x: VertexSet,
    y: VertexSet,
    z: VertexSet,
}

impl SeparationQuery {
    /// Requires `x` and `y` nonempty and `x`, `y`, `z` pairwise disjoint.
    pub fn new(x: VertexSet, y: VertexSet, z: VertexSet) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidQuery("x and y must be nonempty".into()));
        }
        let overlap = |a: &VertexSet, b: &VertexSet| a.intersection(b).next().is_some();
        if overlap(&x, &y) || overlap(&x, &z) || overlap(&y, &z) {
            return Err(Error::InvalidQuery("x, y, z must be pairwise disjoint".into()));
        }
        Ok(SeparationQuery { x, y, z })
    }

    pub fn x(&self) -> &VertexSet {
        &self.x
    }

    pub fn y(&self) -> &VertexSet {
        &self.y
    }

    pub fn z(&self) -> &VertexSet {
        &self.z
    }

    fn check_membership(&self, g: &MixedGraph) -> Result<()> {
        for v in self.x.iter().chain(&self.y).chain(&self.z) {
            if !g.contains(v) {
                return Err(Error::InvalidQuery(format!("unknown vertex `{v}`")));
            }
        }
        Ok(())
    }
}

/// How the walk arrived at the current vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Arrival {
    /// Start vertex, no incoming edge yet.
    Start,
    /// Incoming edge has an arrowhead at the current vertex.
    Head,
    /// Incoming edge has a tail at the current vertex.
    Tail,
}

/// m-separation on an ADMG. DAGs are the bidirected-free special case, where
/// this coincides with d-separation.
pub fn m_separated(g: &MixedGraph, q: &SeparationQuery) -> Result<bool> {
    if !g.validate_class(GraphClass::Admg) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Admg).join("; "),
        ));
    }
    q.check_membership(g)?;

    let n = g.vertex_count();
    let names = g.vertices();
    let in_set = |s: &VertexSet| -> Vec<bool> {
        names.iter().map(|v| s.contains(v)).collect()
    };
    let an_z = in_set(&g.ancestors(q.z())?);
    let in_y = in_set(q.y());
    let in_z = in_set(q.z());

    // Each outgoing move from v is (next vertex, head-at-v?, head-at-next?).
    let mut moves: Vec<Vec<(usize, bool, bool)>> = vec![Vec::new(); n];
    for (p, c) in g.di_edges() {
        let (p, c) = (g.idx(&p)?, g.idx(&c)?);
        moves[p].push((c, false, true));
        moves[c].push((p, true, false));
    }
    for (a, b) in g.bi_edges() {
        let (a, b) = (g.idx(&a)?, g.idx(&b)?);
        moves[a].push((b, true, true));
        moves[b].push((a, true, true));
    }

    // States: (vertex, arrived-with-head?). A walk may continue through v iff
    //   collider at v  -> v is a reflexive ancestor of z,
    //   non-collider   -> v is outside z.
    let mut visited = vec![[false; 2]; n];
    let mut queue: VecDeque<(usize, Arrival)> = VecDeque::new();
    for x in q.x() {
        queue.push_back((g.idx(x)?, Arrival::Start));
    }

    while let Some((v, arrival)) = queue.pop_front() {
        for &(w, head_at_v, head_at_w) in &moves[v] {
            let legal = match arrival {
                Arrival::Start => true,
                Arrival::Head if head_at_v => an_z[v],
                _ => !in_z[v],
            };
            if !legal {
                continue;
            }
            if in_y[w] {
                return Ok(false);
            }
            if !visited[w][head_at_w as usize] {
                visited[w][head_at_w as usize] = true;
                let mark = if head_at_w { Arrival::Head } else { Arrival::Tail };
                queue.push_back((w, mark));
            }
        }
    }
    Ok(true)
}

/// Separation in an undirected graph: true iff every path from `x` to `y`
/// intersects `z`.
pub fn u_separated(g: &MixedGraph, q: &SeparationQuery) -> Result<bool> {
    if !g.validate_class(GraphClass::Ug) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Ug).join("; "),
        ));
    }
    q.check_membership(g)?;

    let mut visited: VertexSet = q.x().clone();
    let mut queue: VecDeque<String> = q.x().iter().cloned().collect();
    while let Some(v) = queue.pop_front() {
        for (a, b) in g.ud_edges() {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if q.y().contains(&w) {
                return Ok(false);
            }
            if q.z().contains(&w) {
                continue;
            }
            if visited.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    Ok(true)
}
