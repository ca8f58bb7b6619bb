//! Semiparametric estimation of the average causal effect of a single binary
//! treatment on an outcome in an ADMG.
//!
//! The treatment's graphical position picks the estimator family:
//!
//! - a-fixable (`de(T) ∩ dis(T) = {T}`): IPW, g-formula, and doubly robust
//!   AIPW, all conditioning on the Markov pillow of `T`;
//! - p-fixable (`ch(T) ∩ dis(T) = ∅`): primal and dual IPW built from the
//!   district factorization;
//! - otherwise, when the effect is still identified: a nested plug-in that
//!   assembles `Π_v p̂(v | mp(v))` and evaluates the identifying functional.
//!
//! Every nuisance conditions on Markov pillows taken along one fixed
//! topological order, which is recorded in the query and reports.

pub mod nuisance;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexSet};
use crate::identify::{evaluate_functional, one_line_id};
use crate::kernel::TabularKernel;
use crate::par::{map_indexed, ExecMode};

pub use nuisance::{ConditionalModel, ModelKind, NuisanceSpec};

/// Positivity warning threshold for fitted probabilities.
const POSITIVITY_THRESHOLD: f64 = 0.01;

/// Estimation strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Ipw,
    GFormula,
    Aipw,
    PrimalIpw,
    DualIpw,
    NestedIpw,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Ipw => "ipw",
            Strategy::GFormula => "gformula",
            Strategy::Aipw => "aipw",
            Strategy::PrimalIpw => "p-ipw",
            Strategy::DualIpw => "d-ipw",
            Strategy::NestedIpw => "n-ipw",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ipw" => Ok(Strategy::Ipw),
            "gformula" => Ok(Strategy::GFormula),
            "aipw" => Ok(Strategy::Aipw),
            "p-ipw" => Ok(Strategy::PrimalIpw),
            "d-ipw" => Ok(Strategy::DualIpw),
            "n-ipw" => Ok(Strategy::NestedIpw),
            other => Err(Error::InvalidQuery(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Structural classification of the treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixability {
    /// `de(T) ∩ dis(T) = {T}`: adjustment-based estimators apply.
    AFixable,
    /// `ch(T) ∩ dis(T) = ∅` (and identified): primal/dual IPW apply.
    PFixable,
    /// Identified, but only the nested plug-in applies.
    NestedOnly,
    NotIdentified,
}

/// A single-treatment, single-outcome effect query with its pillow order.
#[derive(Debug, Clone)]
pub struct EffectQuery {
    graph: MixedGraph,
    treatment: String,
    outcome: String,
    order: Vec<String>,
}

impl EffectQuery {
    pub fn new(graph: MixedGraph, treatment: &str, outcome: &str) -> Result<Self> {
        if !graph.validate_class(GraphClass::Admg) {
            return Err(Error::WrongGraphClass(
                graph.class_violations(GraphClass::Admg).join("; "),
            ));
        }
        if !graph.contains(treatment) {
            return Err(Error::UnknownVertex(treatment.to_string()));
        }
        if !graph.contains(outcome) {
            return Err(Error::UnknownVertex(outcome.to_string()));
        }
        if treatment == outcome {
            return Err(Error::InvalidQuery("treatment must differ from outcome".into()));
        }
        let order = graph.topological_order()?;
        Ok(EffectQuery { graph, treatment: treatment.to_string(), outcome: outcome.to_string(), order })
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn treatment(&self) -> &str {
        &self.treatment
    }

    pub fn outcome(&self) -> &str {
        &self.outcome
    }

    /// The topological order used for Markov pillows.
    pub fn order(&self) -> &[String] {
        &self.order
    }
}

/// Markov pillow of `v`: the district of `v` among its predecessors in
/// `order` (including `v`), plus that district's parents, minus `v`.
pub fn markov_pillow(g: &MixedGraph, v: &str, order: &[String]) -> Result<VertexSet> {
    let pos = order
        .iter()
        .position(|w| w == v)
        .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
    let mut scope: VertexSet = order[..pos].iter().cloned().collect();
    scope.insert(v.to_string());
    let sub = g.subgraph(&scope)?;
    let dis = sub.district(&VertexSet::from([v.to_string()]))?;
    let pa = sub.parents(&dis)?;
    let mut mp: VertexSet = dis.union(&pa).cloned().collect();
    mp.remove(v);
    Ok(mp)
}

/// Classifies the treatment: a-fixable, p-fixable, identified-only, or not
/// identified. Pure in the graph; no data involved.
pub fn classify_fixability(q: &EffectQuery) -> Result<Fixability> {
    let t_set = VertexSet::from([q.treatment.clone()]);
    let de = q.graph.descendants(&t_set)?;
    let dis = q.graph.district(&t_set)?;
    let inter: VertexSet = de.intersection(&dis).cloned().collect();
    if inter == t_set {
        return Ok(Fixability::AFixable);
    }
    let id = one_line_id(&q.graph, &t_set, &VertexSet::from([q.outcome.clone()]))?;
    if !id.identified {
        return Ok(Fixability::NotIdentified);
    }
    let ch = q.graph.children(&t_set)?;
    if ch.intersection(&dis).next().is_none() {
        Ok(Fixability::PFixable)
    } else {
        Ok(Fixability::NestedOnly)
    }
}

/// The preferred strategy for the query's fixability class.
pub fn suggest_strategy(q: &EffectQuery) -> Result<Strategy> {
    match classify_fixability(q)? {
        Fixability::AFixable => Ok(Strategy::Aipw),
        Fixability::PFixable => Ok(Strategy::PrimalIpw),
        Fixability::NestedOnly => Ok(Strategy::NestedIpw),
        Fixability::NotIdentified => Err(Error::NotIdentified(format!(
            "p({}({})) is not identified in this graph",
            q.outcome, q.treatment
        ))),
    }
}

fn strategy_compatible(strategy: Strategy, fixability: Fixability) -> bool {
    match strategy {
        Strategy::Ipw | Strategy::GFormula | Strategy::Aipw => {
            fixability == Fixability::AFixable
        }
        Strategy::PrimalIpw | Strategy::DualIpw => {
            matches!(fixability, Fixability::AFixable | Fixability::PFixable)
        }
        Strategy::NestedIpw => !matches!(fixability, Fixability::NotIdentified),
    }
}

/// Point estimates of `E[Y(1)]`, `E[Y(0)]`, and their difference.
#[derive(Debug, Clone)]
pub struct EffectEstimate {
    pub strategy: Strategy,
    pub ace: f64,
    pub point_t1: f64,
    pub point_t0: f64,
    pub warnings: Vec<String>,
}

/// One fitted conditional factor `p̂(v | mp(v))` with its column layout.
struct Factor {
    response: String,
    response_col: usize,
    predictors: Vec<String>,
    predictor_cols: Vec<usize>,
    treatment_slot: Option<usize>,
    model: Box<dyn ConditionalModel>,
}

impl Factor {
    fn fit(
        d: &Dataset,
        g_order_factor: &str,
        pillow: &VertexSet,
        treatment: &str,
        kind: ModelKind,
        warnings: &mut Vec<String>,
    ) -> Result<Factor> {
        let response = g_order_factor.to_string();
        let response_col = d.column_index(&response)?;
        let predictors: Vec<String> = pillow.iter().cloned().collect();
        let predictor_cols: Vec<usize> =
            predictors.iter().map(|p| d.column_index(p)).collect::<Result<_>>()?;
        let treatment_slot = predictors.iter().position(|p| p == treatment);

        let resp_values = d.column(&response)?;
        let resp_binary = resp_values.iter().all(|&x| x == 0.0 || x == 1.0);
        if !resp_binary {
            return Err(Error::IncompatibleStrategy(format!(
                "conditional factor for `{response}` requires a binary column"
            )));
        }
        let preds_binary = predictor_cols
            .iter()
            .all(|&c| (0..d.nrows()).all(|r| d.value(r, c) == 0.0 || d.value(r, c) == 1.0));
        let mut model = kind.build(true, preds_binary);
        let rows = Self::rows(d, &predictor_cols, None);
        model.fit(&resp_values, &rows)?;
        let probe = model.predict_probability(&rows)?;
        let low = probe.iter().filter(|&&p| !(POSITIVITY_THRESHOLD..=1.0 - POSITIVITY_THRESHOLD).contains(&p)).count();
        if low > 0 {
            warnings.push(format!(
                "positivity: {low} fitted probabilities for `{response}` outside [{POSITIVITY_THRESHOLD}, {}]",
                1.0 - POSITIVITY_THRESHOLD
            ));
        }
        Ok(Factor { response, response_col, predictors, predictor_cols, treatment_slot, model })
    }

    fn rows(d: &Dataset, cols: &[usize], treatment_override: Option<(usize, f64)>) -> Vec<Vec<f64>> {
        (0..d.nrows())
            .map(|r| {
                cols.iter()
                    .enumerate()
                    .map(|(slot, &c)| match treatment_override {
                        Some((s, v)) if s == slot => v,
                        _ => d.value(r, c),
                    })
                    .collect()
            })
            .collect()
    }

    /// Per-row probability of the observed (or overridden) response value,
    /// with the treatment optionally pinned inside the pillow.
    fn observed_probability(
        &self,
        d: &Dataset,
        treatment_value: Option<f64>,
        response_value: Option<f64>,
    ) -> Result<Vec<f64>> {
        let over = match (self.treatment_slot, treatment_value) {
            (Some(slot), Some(v)) => Some((slot, v)),
            _ => None,
        };
        let rows = Self::rows(d, &self.predictor_cols, over);
        let p1 = self.model.predict_probability(&rows)?;
        Ok((0..d.nrows())
            .map(|r| {
                let value = response_value.unwrap_or_else(|| d.value(r, self.response_col));
                if value == 1.0 {
                    p1[r]
                } else {
                    1.0 - p1[r]
                }
            })
            .collect())
    }
}

fn check_binary_treatment(d: &Dataset, treatment: &str) -> Result<Vec<f64>> {
    let t = d.column(treatment)?;
    if !t.iter().all(|&x| x == 0.0 || x == 1.0) {
        return Err(Error::InvalidQuery(format!(
            "treatment column `{treatment}` must be 0/1"
        )));
    }
    Ok(t)
}

/// Point estimation with the given strategy.
///
/// `seed` is accepted for interface uniformity; all implemented estimators
/// are deterministic given the data.
pub fn estimate(
    q: &EffectQuery,
    d: &Dataset,
    strategy: Strategy,
    nuisance: &NuisanceSpec,
    _seed: u64,
) -> Result<EffectEstimate> {
    d.check_matches_graph(&q.graph)?;
    let fixability = classify_fixability(q)?;
    if !strategy_compatible(strategy, fixability) {
        return Err(Error::IncompatibleStrategy(format!(
            "strategy {} requires a different fixability class than {:?}",
            strategy.name(),
            fixability
        )));
    }
    let t_col = check_binary_treatment(d, &q.treatment)?;
    let y_col = d.column(&q.outcome)?;
    let n = d.nrows() as f64;
    let mut warnings = Vec::new();

    let mut point = |t_val: f64| -> Result<f64> {
        match strategy {
            Strategy::Ipw => {
                let pillow = markov_pillow(&q.graph, &q.treatment, &q.order)?;
                let f = Factor::fit(d, &q.treatment, &pillow, &q.treatment, nuisance.conditionals, &mut warnings)?;
                let pi = f.observed_probability(d, None, Some(t_val))?;
                let mut acc = 0.0;
                for r in 0..d.nrows() {
                    if t_col[r] == t_val {
                        acc += y_col[r] / pi[r];
                    }
                }
                Ok(acc / n)
            }
            Strategy::GFormula => {
                let mu = outcome_model(q, d, nuisance)?;
                let mu_t = mu.predict_at(d, t_val)?;
                Ok(mu_t.iter().sum::<f64>() / n)
            }
            Strategy::Aipw => {
                let pillow = markov_pillow(&q.graph, &q.treatment, &q.order)?;
                let f = Factor::fit(d, &q.treatment, &pillow, &q.treatment, nuisance.conditionals, &mut warnings)?;
                let pi = f.observed_probability(d, None, Some(t_val))?;
                let mu = outcome_model(q, d, nuisance)?;
                let mu_t = mu.predict_at(d, t_val)?;
                let mut acc = 0.0;
                for r in 0..d.nrows() {
                    let indicator = if t_col[r] == t_val { 1.0 } else { 0.0 };
                    acc += indicator / pi[r] * (y_col[r] - mu_t[r]) + mu_t[r];
                }
                Ok(acc / n)
            }
            Strategy::PrimalIpw => {
                let district = q.graph.district(&VertexSet::from([q.treatment.clone()]))?;
                let mut factors = Vec::new();
                for v in &district {
                    let pillow = markov_pillow(&q.graph, v, &q.order)?;
                    factors.push(Factor::fit(d, v, &pillow, &q.treatment, nuisance.conditionals, &mut warnings)?);
                }
                // Numerator: Σ_{t'} Π_{v ∈ D} p̂(x_v | mp(v)) with T = t' in
                // every factor, including as the response of T's own factor.
                let mut numerator = vec![0.0; d.nrows()];
                for t_prime in [0.0, 1.0] {
                    let mut prod = vec![1.0; d.nrows()];
                    for f in &factors {
                        let resp_override =
                            (f.response == q.treatment).then_some(t_prime);
                        let p = f.observed_probability(d, Some(t_prime), resp_override)?;
                        for r in 0..d.nrows() {
                            prod[r] *= p[r];
                        }
                    }
                    for r in 0..d.nrows() {
                        numerator[r] += prod[r];
                    }
                }
                let mut denominator = vec![1.0; d.nrows()];
                for f in &factors {
                    let p = f.observed_probability(d, None, None)?;
                    for r in 0..d.nrows() {
                        denominator[r] *= p[r];
                    }
                }
                let mut acc = 0.0;
                for r in 0..d.nrows() {
                    if t_col[r] == t_val {
                        acc += numerator[r] / denominator[r] * y_col[r];
                    }
                }
                Ok(acc / n)
            }
            Strategy::DualIpw => {
                let district = q.graph.district(&VertexSet::from([q.treatment.clone()]))?;
                let rest: VertexSet =
                    q.graph.vertex_set().difference(&district).cloned().collect();
                let mut weight = vec![1.0; d.nrows()];
                for v in &rest {
                    let pillow = markov_pillow(&q.graph, v, &q.order)?;
                    let f = Factor::fit(d, v, &pillow, &q.treatment, nuisance.conditionals, &mut warnings)?;
                    let num = f.observed_probability(d, Some(t_val), None)?;
                    let den = f.observed_probability(d, None, None)?;
                    for r in 0..d.nrows() {
                        weight[r] *= num[r] / den[r];
                    }
                }
                let mut acc = 0.0;
                for r in 0..d.nrows() {
                    acc += weight[r] * y_col[r];
                }
                Ok(acc / n)
            }
            Strategy::NestedIpw => {
                let p_hat = plug_in_joint(q, d, nuisance, &mut warnings)?;
                let id = one_line_id(
                    &q.graph,
                    &VertexSet::from([q.treatment.clone()]),
                    &VertexSet::from([q.outcome.clone()]),
                )?;
                let eval = evaluate_functional(&id, &p_hat)?;
                warnings.extend(eval.warnings.iter().cloned());
                let mut assign = std::collections::BTreeMap::new();
                assign.insert(q.treatment.clone(), t_val as usize);
                assign.insert(q.outcome.clone(), 1usize);
                eval.distribution.value_at(&assign)
            }
        }
    };

    let point_t1 = point(1.0)?;
    let point_t0 = point(0.0)?;
    warnings.sort();
    warnings.dedup();
    Ok(EffectEstimate {
        strategy,
        ace: point_t1 - point_t0,
        point_t1,
        point_t0,
        warnings,
    })
}

/// Outcome regression `E[Y | T, mp(T)]` with the treatment as the last
/// predictor column.
struct OutcomeModel {
    predictor_cols: Vec<usize>,
    treatment_slot: usize,
    model: Box<dyn ConditionalModel>,
    binary_outcome: bool,
}

impl OutcomeModel {
    fn predict_at(&self, d: &Dataset, t_val: f64) -> Result<Vec<f64>> {
        let rows = Factor::rows(d, &self.predictor_cols, Some((self.treatment_slot, t_val)));
        if self.binary_outcome {
            self.model.predict_probability(&rows)
        } else {
            self.model.predict_mean(&rows)
        }
    }
}

fn outcome_model(q: &EffectQuery, d: &Dataset, nuisance: &NuisanceSpec) -> Result<OutcomeModel> {
    let pillow = markov_pillow(&q.graph, &q.treatment, &q.order)?;
    let mut predictors: Vec<String> = pillow.iter().cloned().collect();
    predictors.push(q.treatment.clone());
    let treatment_slot = predictors.len() - 1;
    let predictor_cols: Vec<usize> =
        predictors.iter().map(|p| d.column_index(p)).collect::<Result<_>>()?;
    let y = d.column(&q.outcome)?;
    let binary_outcome = y.iter().all(|&v| v == 0.0 || v == 1.0);
    let preds_binary = predictor_cols
        .iter()
        .all(|&c| (0..d.nrows()).all(|r| d.value(r, c) == 0.0 || d.value(r, c) == 1.0));
    let mut model = nuisance.outcome.build(binary_outcome, preds_binary);
    let rows = Factor::rows(d, &predictor_cols, None);
    model.fit(&y, &rows)?;
    Ok(OutcomeModel { predictor_cols, treatment_slot, model, binary_outcome })
}

/// Assembles the plug-in joint `Π_v p̂(v | mp(v))` as a tabular kernel over
/// all (binary) vertices.
fn plug_in_joint(
    q: &EffectQuery,
    d: &Dataset,
    nuisance: &NuisanceSpec,
    warnings: &mut Vec<String>,
) -> Result<TabularKernel> {
    if !d.is_binary() {
        return Err(Error::IncompatibleStrategy(
            "the nested plug-in requires all-binary data".into(),
        ));
    }
    let vars: Vec<String> = q.graph.vertices().to_vec();
    let n_vars = vars.len();
    if n_vars > 20 {
        return Err(Error::TooLarge(format!(
            "plug-in joint over {n_vars} binary variables"
        )));
    }
    // One probability table per vertex: P(v = 1 | pillow cell).
    let mut factor_tables: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for v in &vars {
        let pillow = markov_pillow(&q.graph, v, &q.order)?;
        let factor = Factor::fit(d, v, &pillow, &q.treatment, nuisance.conditionals, warnings)?;
        let pillow_positions: Vec<usize> = factor
            .predictors
            .iter()
            .map(|p| vars.iter().position(|w| w == p).expect("pillow is a vertex subset"))
            .collect();
        let cells = 1usize << pillow_positions.len();
        let mut table = vec![0.0; cells];
        for (cell, slot) in table.iter_mut().enumerate() {
            let row: Vec<f64> = (0..pillow_positions.len())
                .map(|k| ((cell >> k) & 1) as f64)
                .collect();
            *slot = factor.model.predict_probability(&[row])?[0];
        }
        factor_tables.push((pillow_positions, table));
    }
    // Kernel table with variable 0 as the slowest dimension.
    let size = 1usize << n_vars;
    let mut table = vec![0.0f64; size];
    for (idx, slot) in table.iter_mut().enumerate() {
        // Decode kernel index into per-variable values.
        let mut values = vec![0usize; n_vars];
        let mut rem = idx;
        for i in (0..n_vars).rev() {
            values[i] = rem & 1;
            rem >>= 1;
        }
        let mut p = 1.0;
        for (i, (pillow_positions, probs)) in factor_tables.iter().enumerate() {
            let mut cell = 0usize;
            for (k, &pos) in pillow_positions.iter().enumerate() {
                cell |= values[pos] << k;
            }
            let p1 = probs[cell];
            p *= if values[i] == 1 { p1 } else { 1.0 - p1 };
        }
        *slot = p;
    }
    TabularKernel::joint(vars, vec![2; n_vars], table)
}

/// A percentile bootstrap interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapInterval {
    pub lower: f64,
    pub upper: f64,
    pub replicates: usize,
    pub failures: usize,
}

/// Runs bootstrap replicates of the ACE. Replicate `r` draws its resample
/// from a generator seeded by `(seed, r)`, so results are identical under
/// parallel and sequential execution.
pub fn bootstrap_replicates(
    q: &EffectQuery,
    d: &Dataset,
    strategy: Strategy,
    nuisance: &NuisanceSpec,
    replicates: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<(Vec<f64>, usize)> {
    let n = d.nrows();
    let results: Vec<Result<f64>> = map_indexed(replicates, mode, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, r as u64));
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let resampled = d.take_rows(&rows);
        estimate(q, &resampled, strategy, nuisance, seed).map(|e| e.ace)
    });
    let mut estimates = Vec::with_capacity(replicates);
    let mut failures = 0usize;
    for r in results {
        match r {
            Ok(v) => estimates.push(v),
            Err(_) => failures += 1,
        }
    }
    Ok((estimates, failures))
}

/// Percentile bootstrap confidence interval for the ACE.
pub fn bootstrap_ci(
    q: &EffectQuery,
    d: &Dataset,
    strategy: Strategy,
    nuisance: &NuisanceSpec,
    replicates: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapInterval> {
    if replicates < 100 {
        return Err(Error::InvalidQuery("need at least 100 bootstrap replicates".into()));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidQuery("confidence level must be in (0, 1)".into()));
    }
    let (mut estimates, failures) =
        bootstrap_replicates(q, d, strategy, nuisance, replicates, seed, ExecMode::Parallel)?;
    if failures * 10 > replicates {
        return Err(Error::Estimation(format!(
            "{failures} of {replicates} bootstrap replicates failed"
        )));
    }
    estimates.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let alpha = (1.0 - level) / 2.0;
    Ok(BootstrapInterval {
        lower: percentile(&estimates, alpha),
        upper: percentile(&estimates, 1.0 - alpha),
        replicates: estimates.len(),
        failures,
    })
}

fn mix_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step keeps per-replicate streams well separated.
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Linear-interpolation percentile of sorted values.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}
