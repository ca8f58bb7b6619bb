//! Shared test oracles and fixtures.
//!
//! Everything here is deliberately independent of the library's algorithmic
//! paths: separation oracles enumerate typed paths from the raw edge lists,
//! and interventional truths come from explicit latent-variable models
//! evaluated by exhaustive enumeration.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixedcausal::{BinaryCounts, Dataset, MixedGraph, TabularKernel};

// ---------------------------------------------------------------------------
// Fixtures

/// The running example: age -> smoke -> bp -> diabetes, age -> diabetes,
/// smoke <-> diabetes.
pub fn front_door() -> MixedGraph {
    MixedGraph::admg(
        &["age", "smoke", "bp", "diabetes"],
        &[
            ("age", "smoke"),
            ("smoke", "bp"),
            ("bp", "diabetes"),
            ("age", "diabetes"),
        ],
        &[("smoke", "diabetes")],
    )
    .unwrap()
}

/// a -> y confounded by a <-> y: the classic non-identifiable bow.
pub fn bow() -> MixedGraph {
    MixedGraph::admg(&["a", "y"], &[("a", "y")], &[("a", "y")]).unwrap()
}

/// Conditionally ignorable treatment: c -> t -> y, c -> y.
pub fn ignorable() -> MixedGraph {
    MixedGraph::dag(&["c", "t", "y"], &[("c", "t"), ("c", "y"), ("t", "y")]).unwrap()
}

// ---------------------------------------------------------------------------
// Path-enumeration m-separation oracle

/// One step of a typed path: (endpoint, head at the source?, head at the
/// destination?).
#[derive(Debug, Clone, Copy)]
struct Step {
    to: usize,
    head_at_from: bool,
    head_at_to: bool,
}

/// Adjacency built from the public edge lists only.
pub struct PathOracle {
    names: Vec<String>,
    index: HashMap<String, usize>,
    moves: Vec<Vec<Step>>,
    parents: Vec<Vec<usize>>,
    /// All simple typed paths between each ordered pair, built lazily.
    cache: HashMap<(usize, usize), Vec<Vec<Step>>>,
}

impl PathOracle {
    pub fn new(g: &MixedGraph) -> Self {
        let names: Vec<String> = g.vertices().to_vec();
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut moves = vec![Vec::new(); names.len()];
        let mut parents = vec![Vec::new(); names.len()];
        for (p, c) in g.di_edges() {
            let (p, c) = (index[&p], index[&c]);
            moves[p].push(Step { to: c, head_at_from: false, head_at_to: true });
            moves[c].push(Step { to: p, head_at_from: true, head_at_to: false });
            parents[c].push(p);
        }
        for (a, b) in g.bi_edges() {
            let (a, b) = (index[&a], index[&b]);
            moves[a].push(Step { to: b, head_at_from: true, head_at_to: true });
            moves[b].push(Step { to: a, head_at_from: true, head_at_to: true });
        }
        PathOracle { names, index, moves, parents, cache: HashMap::new() }
    }

    fn all_paths(&mut self, x: usize, y: usize) -> &[Vec<Step>] {
        if !self.cache.contains_key(&(x, y)) {
            let mut found = Vec::new();
            let mut on_path = vec![false; self.names.len()];
            on_path[x] = true;
            let mut path: Vec<Step> = Vec::new();
            self.dfs(x, y, &mut on_path, &mut path, &mut found);
            self.cache.insert((x, y), found);
        }
        &self.cache[&(x, y)]
    }

    fn dfs(
        &self,
        at: usize,
        target: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<Step>,
        found: &mut Vec<Vec<Step>>,
    ) {
        for &step in &self.moves[at] {
            if on_path[step.to] {
                continue;
            }
            path.push(step);
            if step.to == target {
                found.push(path.clone());
            } else {
                on_path[step.to] = true;
                self.dfs(step.to, target, on_path, path, found);
                on_path[step.to] = false;
            }
            path.pop();
        }
    }

    /// Reflexive ancestor closure computed from raw parent lists.
    fn ancestors_of_set(&self, z: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        let mut stack: Vec<usize> = z.to_vec();
        for &v in z {
            seen[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Checks every simple typed path against the collider rule: connected
    /// iff some path has all non-colliders outside z and all colliders with
    /// a (reflexive) descendant... i.e. ancestors of z.
    pub fn m_separated(&mut self, x: &str, y: &str, z: &BTreeSet<String>) -> bool {
        let xi = self.index[x];
        let yi = self.index[y];
        let z_idx: Vec<usize> = z.iter().map(|v| self.index[v]).collect();
        let in_z = {
            let mut m = vec![false; self.names.len()];
            for &v in &z_idx {
                m[v] = true;
            }
            m
        };
        let an_z = self.ancestors_of_set(&z_idx);
        // Borrow dance: take paths out of the cache.
        let paths = self.all_paths(xi, yi).to_vec();
        for path in &paths {
            let mut open = true;
            for k in 1..path.len() {
                let v = path[k - 1].to;
                let collider = path[k - 1].head_at_to && path[k].head_at_from;
                let ok = if collider { an_z[v] } else { !in_z[v] };
                if !ok {
                    open = false;
                    break;
                }
            }
            if open {
                return false;
            }
        }
        true
    }
}

/// Textbook d-separation on a DAG by moralizing the ancestral subgraph;
/// a second independent route for the bidirected-free case.
pub fn d_separated_moral(g: &MixedGraph, x: &str, y: &str, z: &BTreeSet<String>) -> bool {
    assert!(g.bi_edges().is_empty() && g.ud_edges().is_empty());
    let names: Vec<String> = g.vertices().to_vec();
    let index: HashMap<String, usize> =
        names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    let mut parents = vec![Vec::new(); names.len()];
    for (p, c) in g.di_edges() {
        parents[index[&c]].push(index[&p]);
    }
    // Ancestral set of x, y, z.
    let mut keep = vec![false; names.len()];
    let mut stack: Vec<usize> = Vec::new();
    for v in [x, y].iter().map(|v| index[*v]).chain(z.iter().map(|v| index[v])) {
        if !keep[v] {
            keep[v] = true;
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        for &p in &parents[v] {
            if !keep[p] {
                keep[p] = true;
                stack.push(p);
            }
        }
    }
    // Moral graph: edges parent-child and co-parent pairs, within the
    // ancestral set.
    let n = names.len();
    let mut adj = vec![vec![false; n]; n];
    for c in 0..n {
        if !keep[c] {
            continue;
        }
        let ps: Vec<usize> = parents[c].iter().copied().filter(|&p| keep[p]).collect();
        for &p in &ps {
            adj[p][c] = true;
            adj[c][p] = true;
        }
        for i in 0..ps.len() {
            for j in (i + 1)..ps.len() {
                adj[ps[i]][ps[j]] = true;
                adj[ps[j]][ps[i]] = true;
            }
        }
    }
    // Reachability from x to y avoiding z.
    let in_z: Vec<bool> = (0..n).map(|v| z.contains(&names[v])).collect();
    let mut seen = vec![false; n];
    let mut stack = vec![index[x]];
    seen[index[x]] = true;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if adj[v][w] && !seen[w] && keep[w] {
                if w == index[y] {
                    return false;
                }
                if !in_z[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Random graphs

/// Random ADMG: directed edges respect a random permutation (hence acyclic),
/// bidirected edges are independent coin flips.
pub fn random_admg(n: usize, p_di: f64, p_bi: f64, rng: &mut ChaCha8Rng) -> MixedGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut di = Vec::new();
    let mut bi = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p_di) {
                di.push((names[perm[i]].clone(), names[perm[j]].clone()));
            }
            if rng.random_bool(p_bi) {
                bi.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    MixedGraph::admg(&names, &di, &bi).unwrap()
}

/// Random bow-free ADMG: like [`random_admg`] but no pair carries both a
/// directed and a bidirected edge. Linear SEMs on bow-free graphs are
/// almost-everywhere identifiable, which RICF's least-squares steps need.
pub fn random_bow_free_admg(n: usize, p_di: f64, p_bi: f64, rng: &mut ChaCha8Rng) -> MixedGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut di = Vec::new();
    let mut bi = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p_di) {
                di.push((names[perm[i]].clone(), names[perm[j]].clone()));
            } else if rng.random_bool(p_bi) {
                bi.push((names[perm[i]].clone(), names[perm[j]].clone()));
            }
        }
    }
    MixedGraph::admg(&names, &di, &bi).unwrap()
}

/// All ADMGs on `n` labeled vertices: every acyclic orientation of directed
/// edges crossed with every bidirected edge subset.
pub fn all_admgs(n: usize) -> Vec<MixedGraph> {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let ordered_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let unordered_pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for di_mask in 0u32..(1 << ordered_pairs.len()) {
        let di: Vec<(String, String)> = ordered_pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| di_mask & (1 << k) != 0)
            .map(|(_, &(i, j))| (names[i].clone(), names[j].clone()))
            .collect();
        // Quick acyclicity check before enumerating bidirected subsets.
        let candidate = MixedGraph::new(&names, &di, &[], &[]).unwrap();
        if candidate.topological_order().is_err() {
            continue;
        }
        for bi_mask in 0u32..(1 << unordered_pairs.len()) {
            let bi: Vec<(String, String)> = unordered_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| bi_mask & (1 << k) != 0)
                .map(|(_, &(i, j))| (names[i].clone(), names[j].clone()))
                .collect();
            out.push(MixedGraph::admg(&names, &di, &bi).unwrap());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Latent-variable models: ground truth for identification and estimation

/// A binary DAG model over observed vertices plus one latent parent per
/// bidirected edge. Provides the exact observed joint and exact
/// interventional distributions by enumeration.
pub struct LatentBinaryModel {
    /// Observed names in the ADMG's vertex order, then latent names.
    vars: Vec<String>,
    n_observed: usize,
    /// Parent indices per variable (latents have none).
    parents: Vec<Vec<usize>>,
    /// P(v = 1 | parent assignment), indexed by parent bits (bit k = value
    /// of parents[v][k]).
    cpt: Vec<Vec<f64>>,
}

impl LatentBinaryModel {
    /// Random strictly positive CPTs in [0.2, 0.8].
    pub fn random(g: &MixedGraph, rng: &mut ChaCha8Rng) -> Self {
        Self::build(g, |_, cells, rng_| {
            (0..cells).map(|_| 0.2 + 0.6 * rng_.random::<f64>()).collect()
        }, rng)
    }

    fn build<F>(g: &MixedGraph, mut make_cpt: F, rng: &mut ChaCha8Rng) -> Self
    where
        F: FnMut(&str, usize, &mut ChaCha8Rng) -> Vec<f64>,
    {
        let observed: Vec<String> = g.vertices().to_vec();
        let n_observed = observed.len();
        let index: HashMap<String, usize> =
            observed.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut vars = observed.clone();
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n_observed];
        for (p, c) in g.di_edges() {
            parents[index[&c]].push(index[&p]);
        }
        for (a, b) in g.bi_edges() {
            let u = vars.len();
            vars.push(format!("u_{a}_{b}"));
            parents.push(Vec::new());
            parents[index[&a]].push(u);
            parents[index[&b]].push(u);
        }
        let mut cpt = Vec::with_capacity(vars.len());
        for v in 0..vars.len() {
            let cells = 1usize << parents[v].len();
            cpt.push(make_cpt(&vars[v], cells, rng));
        }
        LatentBinaryModel { vars, n_observed, parents, cpt }
    }

    fn total_vars(&self) -> usize {
        self.vars.len()
    }

    /// Probability of one full assignment (observed and latent).
    fn full_probability(&self, bits: u64) -> f64 {
        let mut p = 1.0;
        for v in 0..self.total_vars() {
            let mut cell = 0usize;
            for (k, &pa) in self.parents[v].iter().enumerate() {
                cell |= (((bits >> pa) & 1) as usize) << k;
            }
            let p1 = self.cpt[v][cell];
            p *= if (bits >> v) & 1 == 1 { p1 } else { 1.0 - p1 };
        }
        p
    }

    /// Exact observed joint by summing out the latents, as a table over the
    /// observed vertex order (bit i = vertex i).
    pub fn observed_joint_bits(&self) -> Vec<f64> {
        let n_obs = self.n_observed;
        let n_all = self.total_vars();
        let mut table = vec![0.0f64; 1 << n_obs];
        for bits in 0u64..(1 << n_all) {
            let obs = (bits & ((1 << n_obs) - 1)) as usize;
            table[obs] += self.full_probability(bits);
        }
        table
    }

    /// Observed joint as a kernel over the graph's vertices.
    pub fn observed_joint_kernel(&self) -> TabularKernel {
        let n = self.n_observed;
        let bits_table = self.observed_joint_bits();
        let mut table = vec![0.0f64; 1 << n];
        for (state, &p) in bits_table.iter().enumerate() {
            let mut idx = 0usize;
            for i in 0..n {
                idx = idx * 2 + ((state >> i) & 1);
            }
            table[idx] = p;
        }
        TabularKernel::joint(self.vars[..n].to_vec(), vec![2; n], table).unwrap()
    }

    /// Exact interventional distribution `p(Y(a) = y)` by truncated
    /// factorization: drop the treated factors, clamp their values.
    pub fn interventional(
        &self,
        treatment: &BTreeMap<String, u8>,
        outcomes: &BTreeSet<String>,
        outcome_bits: &BTreeMap<String, u8>,
    ) -> f64 {
        let n_all = self.total_vars();
        let t_idx: BTreeMap<usize, u8> = treatment
            .iter()
            .map(|(k, &v)| (self.vars.iter().position(|w| w == k).unwrap(), v))
            .collect();
        let y_idx: Vec<(usize, u8)> = outcomes
            .iter()
            .map(|k| {
                (
                    self.vars.iter().position(|w| w == k).unwrap(),
                    outcome_bits[k],
                )
            })
            .collect();
        let mut total = 0.0;
        'states: for bits in 0u64..(1 << n_all) {
            for (&ti, &tv) in &t_idx {
                if ((bits >> ti) & 1) as u8 != tv {
                    continue 'states;
                }
            }
            for &(yi, yv) in &y_idx {
                if ((bits >> yi) & 1) as u8 != yv {
                    continue 'states;
                }
            }
            let mut p = 1.0;
            for v in 0..n_all {
                if t_idx.contains_key(&v) {
                    continue;
                }
                let mut cell = 0usize;
                for (k, &pa) in self.parents[v].iter().enumerate() {
                    cell |= (((bits >> pa) & 1) as usize) << k;
                }
                let p1 = self.cpt[v][cell];
                p *= if (bits >> v) & 1 == 1 { p1 } else { 1.0 - p1 };
            }
            total += p;
        }
        total
    }

    /// Average causal effect of a single binary treatment on `P(y = 1)`.
    pub fn true_ace(&self, treatment: &str, outcome: &str) -> f64 {
        let y = BTreeSet::from([outcome.to_string()]);
        let y1 = BTreeMap::from([(outcome.to_string(), 1u8)]);
        let p1 = self.interventional(
            &BTreeMap::from([(treatment.to_string(), 1u8)]),
            &y,
            &y1,
        );
        let p0 = self.interventional(
            &BTreeMap::from([(treatment.to_string(), 0u8)]),
            &y,
            &y1,
        );
        p1 - p0
    }

    /// Draws observed samples as a dataset (columns in graph vertex order).
    pub fn sample_dataset(&self, n: usize, seed: u64) -> Dataset {
        let table = self.observed_joint_bits();
        sample_bits_dataset(&table, &self.vars[..self.n_observed], n, seed)
    }
}

/// The front-door latent model with fixed CPTs used across estimation tests.
/// Its true ACE is 0.45 * 0.35 = 0.1575.
pub fn front_door_latent() -> LatentBinaryModel {
    let g = front_door();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    LatentBinaryModel::build(
        &g,
        |name, cells, _| match name {
            "age" => vec![0.4],
            // parents: (age, u) -> bits (age = bit 0, u = bit 1).
            "smoke" => vec![0.2, 0.5, 0.55, 0.85],
            // parent: smoke.
            "bp" => vec![0.3, 0.75],
            // Parents in recorded order: (age, bp, u) -> bits 0, 1, 2.
            "diabetes" => {
                assert_eq!(cells, 8);
                let mut t = vec![0.0; 8];
                for (i, slot) in t.iter_mut().enumerate() {
                    let age = i & 1;
                    let bp = (i >> 1) & 1;
                    let u = (i >> 2) & 1;
                    *slot = 0.15
                        + 0.35 * bp as f64
                        + 0.15 * age as f64
                        + 0.25 * u as f64;
                }
                t
            }
            u if u.starts_with("u_") => vec![0.5],
            other => panic!("unexpected variable {other}"),
        },
        &mut rng,
    )
}

/// A binary ignorable model c -> t -> y, c -> y with true ACE 0.3.
pub fn ignorable_latent() -> LatentBinaryModel {
    let g = ignorable();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    LatentBinaryModel::build(
        &g,
        |name, _cells, _| match name {
            "c" => vec![0.5],
            // parent: c.
            "t" => vec![0.3, 0.7],
            // parents: (c, t) in recorded order — see test assertions.
            "y" => vec![0.2, 0.5, 0.5, 0.8],
            other => panic!("unexpected variable {other}"),
        },
        &mut rng,
    )
}

// ---------------------------------------------------------------------------
// Sampling helpers

/// Samples rows from a joint table in bit convention (bit i = variable i),
/// returning a dataset with the given column names.
pub fn sample_bits_dataset(table: &[f64], names: &[String], n: usize, seed: u64) -> Dataset {
    let mut cumulative = Vec::with_capacity(table.len());
    let mut acc = 0.0;
    for &p in table {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    let total = *cumulative.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = names.len();
    let mut data = Vec::with_capacity(n * k);
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * total;
        let state = cumulative.partition_point(|&c| c < u).min(table.len() - 1);
        for i in 0..k {
            data.push(((state >> i) & 1) as f64);
        }
    }
    Dataset::new(names.to_vec(), data).unwrap()
}

/// Same draw, tallied into counts over the given variable order.
pub fn sample_bits_counts(table: &[f64], names: &[String], n: usize, seed: u64) -> BinaryCounts {
    let d = sample_bits_dataset(table, names, n, seed);
    BinaryCounts::from_dataset(&d, names).unwrap()
}

/// Convenience: exact table lookup of a kernel over binary variables in
/// graph vertex order, by state bits.
pub fn kernel_value_bits(kernel: &TabularKernel, names: &[String], state: usize) -> f64 {
    let assign: BTreeMap<String, usize> = names
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), (state >> i) & 1))
        .collect();
    kernel.value_at(&assign).unwrap()
}
