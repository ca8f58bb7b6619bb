//! Conditional ADMGs and the fixing operation.
//!
//! A [`Cadmg`] splits the vertices of an ADMG into random and context sets.
//! Context vertices carry no bidirected edges and have no incoming directed
//! edges, so directed paths and districts among random vertices can be read
//! off the underlying graph directly. Fixing a vertex `v` is valid when the
//! descendants of `v` meet its district only in `v` itself; the operation
//! moves `v` into the context and deletes every edge that pointed into it.

use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexSet};

/// An ADMG with vertices partitioned into random and context sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cadmg {
    graph: MixedGraph,
    context: VertexSet,
}

impl Cadmg {
    /// Wraps an ADMG with every vertex random.
    pub fn from_admg(graph: &MixedGraph) -> Result<Self> {
        Cadmg::new(graph.clone(), VertexSet::new())
    }

    /// Builds a CADMG, validating the context invariants: context vertices
    /// are declared vertices, touch no bidirected edge, and have no incoming
    /// directed edge.
    pub fn new(graph: MixedGraph, context: VertexSet) -> Result<Self> {
        if !graph.validate_class(GraphClass::Admg) {
            return Err(Error::WrongGraphClass(
                graph.class_violations(GraphClass::Admg).join("; "),
            ));
        }
        for w in &context {
            if !graph.contains(w) {
                return Err(Error::UnknownVertex(w.clone()));
            }
            let single = VertexSet::from([w.clone()]);
            if !graph.siblings(&single)?.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "context vertex `{w}` has a bidirected edge"
                )));
            }
            if !graph.parents(&single)?.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "context vertex `{w}` has an incoming directed edge"
                )));
            }
        }
        Ok(Cadmg { graph, context })
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn context(&self) -> &VertexSet {
        &self.context
    }

    /// Random vertices, sorted.
    pub fn random(&self) -> VertexSet {
        self.graph
            .vertices()
            .iter()
            .filter(|v| !self.context.contains(*v))
            .cloned()
            .collect()
    }

    pub fn is_random(&self, v: &str) -> Result<bool> {
        if !self.graph.contains(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(!self.context.contains(v))
    }

    fn require_random(&self, v: &str) -> Result<()> {
        if !self.is_random(v)? {
            return Err(Error::NotRandom(v.to_string()));
        }
        Ok(())
    }

    /// District of a random vertex among the random vertices.
    pub fn district_of(&self, v: &str) -> Result<VertexSet> {
        self.require_random(v)?;
        // Context vertices carry no bidirected edges, so the full-graph
        // district already stays within the random set.
        self.graph.district(&VertexSet::from([v.to_string()]))
    }

    /// Reflexive descendants of a random vertex among the random vertices.
    pub fn descendants_of(&self, v: &str) -> Result<VertexSet> {
        self.require_random(v)?;
        // Context vertices have no incoming edges, so directed paths from a
        // random vertex never leave the random set.
        self.graph.descendants(&VertexSet::from([v.to_string()]))
    }

    /// Fixing criterion: descendants of `v` intersect its district in `{v}`.
    pub fn fixable(&self, v: &str) -> Result<bool> {
        let de = self.descendants_of(v)?;
        let dis = self.district_of(v)?;
        let mut inter = de.intersection(&dis);
        Ok(inter.next().map(String::as_str) == Some(v) && inter.next().is_none())
    }

    /// Fixes `v`: moves it to the context, deleting all bidirected edges at
    /// `v` and all directed edges into `v`.
    pub fn fix(&self, v: &str) -> Result<Cadmg> {
        if !self.fixable(v)? {
            let de = self.descendants_of(v)?;
            let dis = self.district_of(v)?;
            let overlap: Vec<String> = de.intersection(&dis).cloned().collect();
            return Err(Error::NotFixable {
                vertex: v.to_string(),
                reason: format!(
                    "descendants and district intersect in {{{}}}",
                    overlap.join(", ")
                ),
            });
        }
        let vertices: Vec<String> = self.graph.vertices().to_vec();
        let di: Vec<(String, String)> = self
            .graph
            .di_edges()
            .into_iter()
            .filter(|(_, c)| c != v)
            .collect();
        let bi: Vec<(String, String)> = self
            .graph
            .bi_edges()
            .into_iter()
            .filter(|(a, b)| a != v && b != v)
            .collect();
        let graph = MixedGraph::new(&vertices, &di, &bi, &[])?;
        let mut context = self.context.clone();
        context.insert(v.to_string());
        Ok(Cadmg { graph, context })
    }

    /// Applies a fixing sequence left to right.
    pub fn fix_sequence<S: AsRef<str>>(&self, order: &[S]) -> Result<Cadmg> {
        let mut g = self.clone();
        for v in order {
            g = g.fix(v.as_ref())?;
        }
        Ok(g)
    }

    /// Markov blanket of a random vertex: its district plus the district's
    /// parents, minus the vertex itself.
    pub fn markov_blanket(&self, v: &str) -> Result<VertexSet> {
        let dis = self.district_of(v)?;
        let pa = self.graph.parents(&dis)?;
        let mut mb: VertexSet = dis.union(&pa).cloned().collect();
        mb.remove(v);
        Ok(mb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    fn front_door() -> Cadmg {
        let g = MixedGraph::admg(
            &["age", "smoke", "bp", "diabetes"],
            &[
                ("age", "smoke"),
                ("smoke", "bp"),
                ("bp", "diabetes"),
                ("age", "diabetes"),
            ],
            &[("smoke", "diabetes")],
        )
        .unwrap();
        Cadmg::from_admg(&g).unwrap()
    }

    #[test]
    fn fixability_matches_hand_derivation() {
        let g = front_door();
        assert!(g.fixable("diabetes").unwrap());
        assert!(!g.fixable("smoke").unwrap());
        // Sinks without bidirected edges are always fixable.
        assert!(g.fixable("bp").unwrap());
        assert!(g.fixable("age").unwrap());
    }

    #[test]
    fn fix_deletes_incoming_and_bidirected_edges() {
        let g = front_door();
        let fixed = g.fix("diabetes").unwrap();
        assert!(fixed.context().contains("diabetes"));
        assert!(!fixed.graph().has_bi_edge("smoke", "diabetes"));
        assert!(!fixed.graph().has_di_edge("bp", "diabetes"));
        assert!(!fixed.graph().has_di_edge("age", "diabetes"));
        assert!(fixed.graph().has_di_edge("smoke", "bp"));
        assert_eq!(fixed.district_of("smoke").unwrap(), vset(["smoke"]));
    }

    #[test]
    fn fixing_isolated_vertex_changes_only_status() {
        let g = MixedGraph::admg(&["a", "b"], &[], &[]).unwrap();
        let c = Cadmg::from_admg(&g).unwrap();
        let fixed = c.fix("a").unwrap();
        assert_eq!(fixed.graph(), &g);
        assert_eq!(fixed.context(), &vset(["a"]));
        assert_eq!(fixed.random(), vset(["b"]));
    }

    #[test]
    fn not_fixable_error_names_criterion() {
        let g = front_door();
        let err = g.fix("smoke").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("smoke"), "{msg}");
        assert!(msg.contains("descendants and district"), "{msg}");
    }

    #[test]
    fn context_invariants_enforced() {
        let g = MixedGraph::admg(&["a", "b"], &[("a", "b")], &[]).unwrap();
        // b has an incoming edge; it cannot start as context.
        assert!(Cadmg::new(g.clone(), vset(["b"])).is_err());
        assert!(Cadmg::new(g, vset(["a"])).is_ok());
    }

    #[test]
    fn markov_blanket_is_district_plus_parents() {
        let g = front_door();
        assert_eq!(g.markov_blanket("diabetes").unwrap(), vset(["age", "bp", "smoke"]));
        assert_eq!(g.markov_blanket("bp").unwrap(), vset(["smoke"]));
    }
}
