//! Binary nested Markov models of an ADMG in the Möbius parameterization.
//!
//! The parameters are `q_H(H = 0 | tail)` — one per intrinsic head `H` and
//! assignment of its tail. Joint probabilities are recovered by signed
//! inclusion–exclusion over head partitions: with `O(x)` the variables at 0
//! and `V1(x)` those at 1,
//!
//! `p(x) = Σ_{B ⊆ V1(x)} (-1)^{|B|} Π_{H ∈ Φ(O(x) ∪ B)} q_H(0 | x_tail)`,
//!
//! tails always evaluated at the observed `x`. Maximum likelihood uses
//! cyclic coordinate descent: the joint is affine in each single parameter,
//! so every coordinate problem is a concave line search on the feasible
//! subinterval of [0, 1] where all 2^|V| implied probabilities stay
//! nonnegative (the parameters are variationally dependent).
//!
//! Joint reconstruction materializes all 2^|V| states; construction is
//! rejected above [`MAX_BINARY_VERTICES`] vertices.

use std::collections::{BTreeMap, HashMap};

use crate::data::BinaryCounts;
use crate::error::{Error, Result};
use crate::fixing::Cadmg;
use crate::graph::{GraphClass, MixedGraph, VertexSet};
use crate::identify::{evaluate_functional, one_line_id};
use crate::intrinsic::{intrinsic_catalog, IntrinsicCatalog};
use crate::kernel::{fix_kernel, TabularKernel};
use crate::par::{map_indexed, ExecMode};

/// Hard limit on the vertex count: the joint table has `2^|V|` entries.
pub const MAX_BINARY_VERTICES: usize = 15;

/// Default log-likelihood gain per cycle below which fitting stops.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default maximum number of coordinate-descent cycles.
pub const DEFAULT_MAX_ITER: usize = 500;

/// One head's parameter block.
#[derive(Debug, Clone)]
struct HeadBlock {
    head: VertexSet,
    /// Vertex indices of the head, as a bitmask in graph vertex order.
    head_mask: u64,
    /// Tail variables, sorted; bit `k` of a tail cell is the value of
    /// `tail[k]`.
    tail: Vec<String>,
    tail_positions: Vec<usize>,
    /// `q_H(H = 0 | tail cell)`, indexed by tail cell.
    q: Vec<f64>,
}

/// A binary nested Markov model with Möbius parameters.
#[derive(Debug, Clone)]
pub struct MoebiusModel {
    graph: MixedGraph,
    catalog: IntrinsicCatalog,
    blocks: Vec<HeadBlock>,
    /// Φ(C) for every vertex mask `C`, as indices into `blocks`.
    partitions: Vec<Vec<usize>>,
}

/// Result of a maximum likelihood fit.
#[derive(Debug, Clone)]
pub struct MoebiusFit {
    pub model: MoebiusModel,
    pub converged: bool,
    pub cycles: usize,
    pub log_likelihood: f64,
    /// Parameter cells (report keys) with no supporting data, left at their
    /// initialized values.
    pub empty_cells: Vec<String>,
    /// Largest deviation of the implied joint's total mass from one seen at
    /// any accepted iterate.
    pub max_normalization_gap: f64,
}

/// Recursive head partition Φ(c) of a vertex set.
///
/// Works on a shrinking ancestral working set: take the ancestral closure of
/// the remaining vertices, and for each district of the induced subgraph
/// form the district's head (its childless vertices). A head lying entirely
/// inside `c` becomes a partition element; otherwise the head's outside
/// vertices are peeled off the working set and the district is revisited.
/// Every emitted element is the head of an intrinsic set, so each carries a
/// Möbius parameter. Validated against exact joints by the
/// distribution-level round-trip tests, exhaustively over all small ADMGs.
pub fn head_partition(g: &MixedGraph, c: &VertexSet) -> Result<Vec<VertexSet>> {
    if !g.validate_class(GraphClass::Admg) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Admg).join("; "),
        ));
    }
    for v in c {
        if !g.contains(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    let mut out = Vec::new();
    let mut remaining = c.clone();
    let mut working = g.vertex_set();
    while !remaining.is_empty() {
        let gw = g.subgraph(&working)?;
        working = gw.ancestors(&remaining)?;
        let ga = g.subgraph(&working)?;
        let mut emitted = VertexSet::new();
        let mut stripped = VertexSet::new();
        for district in ga.districts() {
            let mut head = VertexSet::new();
            for v in &district {
                let children = ga.children(&VertexSet::from([v.clone()]))?;
                if children.intersection(&district).next().is_none() {
                    head.insert(v.clone());
                }
            }
            if head.is_subset(&remaining) {
                emitted.extend(head.iter().cloned());
                out.push(head);
            } else {
                stripped.extend(head.difference(&remaining).cloned());
            }
        }
        if emitted.is_empty() && stripped.is_empty() {
            return Err(Error::Internal(format!(
                "head partition stalled on {remaining:?}"
            )));
        }
        remaining = remaining.difference(&emitted).cloned().collect();
        working = working
            .difference(&emitted)
            .filter(|v| !stripped.contains(*v))
            .cloned()
            .collect();
    }
    out.sort();
    Ok(out)
}

impl MoebiusModel {
    /// Builds the model skeleton with all parameters at 1/2^|H| (the uniform
    /// distribution, which is Markov to every graph).
    pub fn new(graph: MixedGraph) -> Result<Self> {
        if !graph.validate_class(GraphClass::Admg) {
            return Err(Error::WrongGraphClass(
                graph.class_violations(GraphClass::Admg).join("; "),
            ));
        }
        let n = graph.vertex_count();
        if n == 0 {
            return Err(Error::EmptyData);
        }
        if n > MAX_BINARY_VERTICES {
            return Err(Error::TooLarge(format!(
                "{n} vertices exceed the {MAX_BINARY_VERTICES}-vertex joint reconstruction limit"
            )));
        }
        let catalog = intrinsic_catalog(&graph)?;
        let mut blocks = Vec::new();
        let mut head_of_mask: HashMap<u64, usize> = HashMap::new();
        for entry in catalog.entries() {
            let mut head_mask = 0u64;
            for v in &entry.head {
                head_mask |= 1 << graph.idx(v)?;
            }
            let tail: Vec<String> = entry.tail.iter().cloned().collect();
            let tail_positions: Vec<usize> =
                tail.iter().map(|v| graph.idx(v)).collect::<Result<_>>()?;
            let cells = 1usize << tail.len();
            let uniform = 0.5f64.powi(entry.head.len() as i32);
            head_of_mask.insert(head_mask, blocks.len());
            blocks.push(HeadBlock {
                head: entry.head.clone(),
                head_mask,
                tail,
                tail_positions,
                q: vec![uniform; cells],
            });
        }

        // Precompute Φ(C) for every subset mask.
        let vertex_names: Vec<String> = graph.vertices().to_vec();
        let mut partitions = Vec::with_capacity(1 << n);
        for mask in 0u64..(1 << n) {
            let c: VertexSet = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| vertex_names[i].clone())
                .collect();
            let parts = head_partition(&graph, &c)?;
            let mut idxs = Vec::with_capacity(parts.len());
            for head in parts {
                let mut hm = 0u64;
                for v in &head {
                    hm |= 1 << graph.idx(v)?;
                }
                let idx = head_of_mask.get(&hm).copied().ok_or_else(|| {
                    Error::MissingParameter(format!(
                        "{{{}}}",
                        head.iter().cloned().collect::<Vec<_>>().join(", ")
                    ))
                })?;
                idxs.push(idx);
            }
            partitions.push(idxs);
        }

        Ok(MoebiusModel { graph, catalog, blocks, partitions })
    }

    /// Computes the exact Möbius parameters of a joint distribution that is
    /// Markov to the graph: each `q_H(0 | t)` is read off the kernel of the
    /// intrinsic set of `H` obtained by fixing.
    pub fn from_joint(graph: MixedGraph, joint: &TabularKernel) -> Result<Self> {
        let mut model = MoebiusModel::new(graph)?;
        if joint.outcome_vars() != model.graph.vertex_set() {
            return Err(Error::ShapeMismatch(
                "joint must cover exactly the graph vertices".into(),
            ));
        }
        let entries: Vec<_> = model.catalog.entries().cloned().collect();
        for entry in &entries {
            let mut kernel = joint.clone();
            let mut cadmg = Cadmg::from_admg(&model.graph)?;
            let mut warnings = Vec::new();
            for v in &entry.fixing_order {
                kernel = fix_kernel(&kernel, v, &cadmg, &mut warnings)?;
                cadmg = cadmg.fix(v)?;
            }
            let block_idx = model
                .blocks
                .iter()
                .position(|b| b.head == entry.head)
                .expect("catalog and blocks are aligned");
            let tail = model.blocks[block_idx].tail.clone();
            let in_set: Vec<String> = entry.set.iter().cloned().collect();
            for cell in 0..model.blocks[block_idx].q.len() {
                // Assignment: tail values from the cell bits, everything
                // else at 0 (the kernel cannot depend on those).
                let mut assign: BTreeMap<String, usize> = model
                    .graph
                    .vertices()
                    .iter()
                    .map(|v| (v.clone(), 0usize))
                    .collect();
                for (k, var) in tail.iter().enumerate() {
                    assign.insert(var.clone(), (cell >> k) & 1);
                }
                // Numerator: head at 0, S \ H at the tail values.
                for h in &entry.head {
                    assign.insert(h.clone(), 0);
                }
                let num = kernel.value_at(&assign)?;
                // Denominator: sum over head assignments.
                let head_vars: Vec<String> = entry.head.iter().cloned().collect();
                let mut den = 0.0;
                for hbits in 0..(1usize << head_vars.len()) {
                    let mut a = assign.clone();
                    for (k, hv) in head_vars.iter().enumerate() {
                        a.insert(hv.clone(), (hbits >> k) & 1);
                    }
                    den += kernel.value_at(&a)?;
                }
                let _ = &in_set;
                model.blocks[block_idx].q[cell] = if den > 0.0 { num / den } else { 0.5 };
            }
        }
        Ok(model)
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn catalog(&self) -> &IntrinsicCatalog {
        &self.catalog
    }

    /// Total number of (head, tail-cell) parameters.
    pub fn parameter_count(&self) -> usize {
        self.blocks.iter().map(|b| b.q.len()).sum()
    }

    /// Parameter value by head and tail assignment.
    pub fn parameter(&self, head: &VertexSet, tail_assign: &BTreeMap<String, u8>) -> Result<f64> {
        let block = self
            .blocks
            .iter()
            .find(|b| &b.head == head)
            .ok_or_else(|| {
                Error::MissingParameter(format!(
                    "{{{}}}",
                    head.iter().cloned().collect::<Vec<_>>().join(", ")
                ))
            })?;
        let mut cell = 0usize;
        for (k, var) in block.tail.iter().enumerate() {
            let v = tail_assign.get(var).copied().ok_or_else(|| {
                Error::InvalidAssignment(format!("missing tail value for `{var}`"))
            })?;
            if v > 1 {
                return Err(Error::InvalidAssignment(format!("value {v} for `{var}`")));
            }
            cell |= (v as usize) << k;
        }
        Ok(block.q[cell])
    }

    /// Report keys and values, `"H=h1,h2|T=t1:0,t2:1"` per cell, sorted.
    pub fn parameter_report(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for block in &self.blocks {
            for cell in 0..block.q.len() {
                out.insert(report_key(block, cell), block.q[cell]);
            }
        }
        out
    }

    fn tail_cell_of_state(&self, block: &HeadBlock, state: u64) -> usize {
        let mut cell = 0usize;
        for (k, &pos) in block.tail_positions.iter().enumerate() {
            cell |= (((state >> pos) & 1) as usize) << k;
        }
        cell
    }

    /// Joint probability of one full 0/1 assignment.
    pub fn joint_probability(&self, x: &BTreeMap<String, u8>) -> Result<f64> {
        let n = self.graph.vertex_count();
        let mut state = 0u64;
        for (i, v) in self.graph.vertices().iter().enumerate() {
            let val = x
                .get(v)
                .copied()
                .ok_or_else(|| Error::InvalidAssignment(format!("missing value for `{v}`")))?;
            if val > 1 {
                return Err(Error::InvalidAssignment(format!("value {val} for `{v}`")));
            }
            state |= (val as u64) << i;
        }
        if x.len() != n {
            return Err(Error::InvalidAssignment("assignment has extra variables".into()));
        }
        Ok(self.state_probability(state))
    }

    /// Joint probability of the state whose bit `i` is the value of vertex
    /// `i` in sorted order.
    fn state_probability(&self, state: u64) -> f64 {
        let n = self.graph.vertex_count();
        let full = (1u64 << n) - 1;
        let ones = state;
        let zeros = !state & full;
        // Iterate all submasks b of the ones.
        let mut total = 0.0;
        let mut b = ones;
        loop {
            let sign = if (b.count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            let mask = zeros | b;
            let mut term = 1.0;
            for &idx in &self.partitions[mask as usize] {
                let block = &self.blocks[idx];
                term *= block.q[self.tail_cell_of_state(block, state)];
            }
            total += sign * term;
            if b == 0 {
                break;
            }
            b = (b - 1) & ones;
        }
        total
    }

    /// All `2^|V|` joint probabilities, bit `i` of the index being the value
    /// of vertex `i` in sorted order.
    pub fn joint_table(&self, mode: ExecMode) -> Vec<f64> {
        let n = self.graph.vertex_count();
        map_indexed(1 << n, mode, |s| self.state_probability(s as u64))
    }

    /// The implied joint as a [`TabularKernel`] over the graph vertices.
    pub fn joint_kernel(&self) -> Result<TabularKernel> {
        let n = self.graph.vertex_count();
        let table_bits = self.joint_table(ExecMode::Parallel);
        // TabularKernel indexes variable 0 as the slowest dimension; the bit
        // convention above has vertex 0 as the lowest bit.
        let mut table = vec![0.0f64; 1 << n];
        for (state, &p) in table_bits.iter().enumerate() {
            let mut idx = 0usize;
            for i in 0..n {
                idx = idx * 2 + ((state >> i) & 1);
            }
            table[idx] = p.max(0.0);
        }
        TabularKernel::joint(self.graph.vertices().to_vec(), vec![2; n], table)
    }

    /// Interventional probability `p(Y(a) = y)` computed by identification:
    /// reconstructs the fitted joint and evaluates the identifying
    /// functional.
    pub fn estimate_counterfactual(
        &self,
        treatment: &BTreeMap<String, u8>,
        outcome: &BTreeMap<String, u8>,
    ) -> Result<f64> {
        for (k, v) in treatment.iter().chain(outcome) {
            if !self.graph.contains(k) {
                return Err(Error::InvalidAssignment(format!("unknown vertex `{k}`")));
            }
            if *v > 1 {
                return Err(Error::InvalidAssignment(format!("value {v} for `{k}`")));
            }
        }
        let t_vars: VertexSet = treatment.keys().cloned().collect();
        let y_vars: VertexSet = outcome.keys().cloned().collect();
        if t_vars.intersection(&y_vars).next().is_some() {
            return Err(Error::InvalidAssignment(
                "treatment and outcome variables must be disjoint".into(),
            ));
        }
        let id = one_line_id(&self.graph, &t_vars, &y_vars)?;
        if !id.identified {
            return Err(Error::NotIdentified(format!(
                "p({y_vars:?} | do({t_vars:?})) is not identified in this graph"
            )));
        }
        let joint = self.joint_kernel()?;
        let eval = evaluate_functional(&id, &joint)?;
        let mut assign: BTreeMap<String, usize> = BTreeMap::new();
        for (k, v) in treatment.iter().chain(outcome) {
            assign.insert(k.clone(), *v as usize);
        }
        eval.distribution.value_at(&assign)
    }

    /// `E[Y(1)] - E[Y(0)]` for binary treatment and outcome.
    pub fn average_causal_effect(&self, treatment: &str, outcome: &str) -> Result<f64> {
        let y1 = BTreeMap::from([(outcome.to_string(), 1u8)]);
        let p1 = self.estimate_counterfactual(
            &BTreeMap::from([(treatment.to_string(), 1u8)]),
            &y1,
        )?;
        let p0 = self.estimate_counterfactual(
            &BTreeMap::from([(treatment.to_string(), 0u8)]),
            &y1,
        )?;
        Ok(p1 - p0)
    }
}

fn report_key(block: &HeadBlock, cell: usize) -> String {
    let heads: Vec<&str> = block.head.iter().map(String::as_str).collect();
    let tails: Vec<String> = block
        .tail
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{v}:{}", (cell >> k) & 1))
        .collect();
    format!("H={}|T={}", heads.join(","), tails.join(","))
}

/// State index (vertex-bit convention) of a full 0/1 assignment in graph
/// vertex order.
fn state_of_key(key: &[u8]) -> u64 {
    key.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum()
}

/// Maximum likelihood fit by cyclic coordinate descent with golden-section
/// line searches on feasible intervals.
// Index loops: the coordinate updates mutate `model.blocks[bi].q[cell]`
// while reading the parallel `tail_counts` table.
#[allow(clippy::needless_range_loop)]
pub fn fit_mle(
    g: &MixedGraph,
    data: &BinaryCounts,
    tol: f64,
    max_iter: usize,
) -> Result<MoebiusFit> {
    if tol <= 0.0 || max_iter == 0 {
        return Err(Error::InvalidQuery("tol and max_iter must be positive".into()));
    }
    let mut model = MoebiusModel::new(g.clone())?;
    let vars: Vec<String> = g.vertices().to_vec();
    if data.vars() != vars.as_slice() {
        return Err(Error::ShapeMismatch(
            "count variables must match the graph's vertex order".into(),
        ));
    }
    let n_states = 1usize << vars.len();
    let support: Vec<(usize, f64)> = data
        .counts()
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(key, &c)| (state_of_key(key) as usize, c as f64))
        .collect();

    // Empirical initialization with +1/+2 smoothing, blended toward the
    // uniform parameters until the implied joint is nonnegative.
    let empirical = empirical_parameters(&model, data);
    let uniform: Vec<Vec<f64>> = model
        .blocks
        .iter()
        .map(|b| vec![0.5f64.powi(b.head.len() as i32); b.q.len()])
        .collect();
    let mut lambda = 1.0;
    loop {
        for (bi, block) in model.blocks.iter_mut().enumerate() {
            for cell in 0..block.q.len() {
                block.q[cell] =
                    lambda * empirical[bi][cell] + (1.0 - lambda) * uniform[bi][cell];
            }
        }
        let joint = model.joint_table(ExecMode::Sequential);
        if joint.iter().all(|&p| p >= -1e-12) {
            break;
        }
        lambda *= 0.9;
        if lambda < 1e-6 {
            lambda = 0.0;
        }
    }

    // Cells with no data leave no trace in the likelihood; keep their
    // initialized values and report them.
    let tail_counts = tail_cell_counts(&model, data);
    let mut empty_cells = Vec::new();
    for (bi, block) in model.blocks.iter().enumerate() {
        for cell in 0..block.q.len() {
            if tail_counts[bi][cell] == 0 {
                empty_cells.push(report_key(block, cell));
            }
        }
    }

    let mut joint = model.joint_table(ExecMode::Sequential);
    let ll = |joint: &[f64]| -> f64 {
        support
            .iter()
            .map(|&(s, c)| c * joint[s].max(1e-300).ln())
            .sum()
    };
    let mut log_likelihood = ll(&joint);
    let mut max_gap = (joint.iter().sum::<f64>() - 1.0).abs();
    let mut converged = false;
    let mut cycles = 0;

    for _cycle in 0..max_iter {
        cycles += 1;
        let ll_before = log_likelihood;
        for bi in 0..model.blocks.len() {
            for cell in 0..model.blocks[bi].q.len() {
                if tail_counts[bi][cell] == 0 {
                    continue;
                }
                let current = model.blocks[bi].q[cell];
                // The joint is affine in this parameter: p(s) = base + slope θ.
                model.blocks[bi].q[cell] = 0.0;
                let joint0 = model.joint_table(ExecMode::Sequential);
                model.blocks[bi].q[cell] = 1.0;
                let joint1 = model.joint_table(ExecMode::Sequential);
                model.blocks[bi].q[cell] = current;

                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for s in 0..n_states {
                    let base = joint0[s];
                    let slope = joint1[s] - joint0[s];
                    if slope > 1e-15 {
                        lo = lo.max(-base / slope);
                    } else if slope < -1e-15 {
                        hi = hi.min(-base / slope);
                    } else if base < -1e-9 {
                        return Err(Error::Internal(
                            "feasible set empty during coordinate update".into(),
                        ));
                    }
                }
                lo = lo.clamp(0.0, 1.0);
                hi = hi.clamp(0.0, 1.0);
                if lo > hi {
                    // Rounding pushed the interval past itself; keep current.
                    continue;
                }
                let objective = |theta: f64| -> f64 {
                    support
                        .iter()
                        .map(|&(s, c)| {
                            let p = joint0[s] + (joint1[s] - joint0[s]) * theta;
                            c * p.max(1e-300).ln()
                        })
                        .sum()
                };
                let theta = golden_section_max(&objective, lo, hi);
                let cur_val = objective(current.clamp(lo, hi));
                let new_val = objective(theta);
                let accepted = if new_val >= cur_val { theta } else { current.clamp(lo, hi) };
                model.blocks[bi].q[cell] = accepted;
                for s in 0..n_states {
                    joint[s] = joint0[s] + (joint1[s] - joint0[s]) * accepted;
                }
                let gap = (joint.iter().sum::<f64>() - 1.0).abs();
                max_gap = max_gap.max(gap);
            }
        }
        log_likelihood = ll(&joint);
        if log_likelihood - ll_before < tol {
            converged = true;
            break;
        }
    }

    Ok(MoebiusFit {
        model,
        converged,
        cycles,
        log_likelihood,
        empty_cells,
        max_normalization_gap: max_gap,
    })
}

/// Empirical `p̂(H = 0 | tail = t)` with +1/+2 smoothing per block and cell.
fn empirical_parameters(model: &MoebiusModel, data: &BinaryCounts) -> Vec<Vec<f64>> {
    model
        .blocks
        .iter()
        .map(|block| {
            let mut zeros = vec![0.0f64; block.q.len()];
            let mut totals = vec![0.0f64; block.q.len()];
            for (key, &c) in data.counts() {
                let state = state_of_key(key);
                let cell = model.tail_cell_of_state(block, state);
                totals[cell] += c as f64;
                if state & block.head_mask == 0 {
                    zeros[cell] += c as f64;
                }
            }
            (0..block.q.len())
                .map(|cell| (zeros[cell] + 1.0) / (totals[cell] + 2.0))
                .collect()
        })
        .collect()
}

fn tail_cell_counts(model: &MoebiusModel, data: &BinaryCounts) -> Vec<Vec<u64>> {
    model
        .blocks
        .iter()
        .map(|block| {
            let mut totals = vec![0u64; block.q.len()];
            for (key, &c) in data.counts() {
                let cell = model.tail_cell_of_state(block, state_of_key(key));
                totals[cell] += c;
            }
            totals
        })
        .collect()
}

/// Golden-section maximization of a unimodal function on [lo, hi].
fn golden_section_max(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    if b - a < 1e-15 {
        return 0.5 * (a + b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..90 {
        if b - a < 1e-14 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // The optimum may sit exactly on the original boundary.
    let candidates = [mid, lo, hi];
    let mut best = mid;
    let mut best_val = f64::NEG_INFINITY;
    for &t in &candidates {
        let v = f(t);
        if v > best_val {
            best_val = v;
            best = t;
        }
    }
    best
}
