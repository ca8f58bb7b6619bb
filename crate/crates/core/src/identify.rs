//! Nonparametric identification of interventional distributions by fixing.
//!
//! `p(Y(a))` is identified iff every district of the graph induced on
//! `Y* = an_{G[V \ A]}(Y)` can be reached by a valid fixing sequence; the
//! identifying functional is then `Σ_{Y* \ Y} Π_D φ_{V \ D}(p(V); G)`. The
//! functional is kept as an expression tree so that rendering and numeric
//! evaluation are two views of the same object.

use serde_json::json;

use crate::error::{Error, Result};
use crate::fixing::Cadmg;
use crate::graph::{GraphClass, MixedGraph, VertexSet};
use crate::intrinsic::reach_set;
use crate::kernel::{fix_kernel, TabularKernel};

/// One district of `G[Y*]` together with a valid fixing order for its
/// complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistrictPlan {
    pub district: VertexSet,
    pub fixing_order: Vec<String>,
}

/// The identifying functional as an expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Functional {
    /// The observed joint `p(V)`.
    Joint,
    /// A fixing chain `φ_{order}(arg; G)` applied left to right.
    Fix { order: Vec<String>, arg: Box<Functional> },
    /// Product of factors.
    Product(Vec<Functional>),
    /// Sum over the named variables.
    Margin { over: Vec<String>, arg: Box<Functional> },
}

/// Outcome of [`one_line_id`].
#[derive(Debug, Clone)]
pub struct IdentificationResult {
    graph: MixedGraph,
    pub identified: bool,
    pub treatments: VertexSet,
    pub outcomes: VertexSet,
    /// Ancestors of the outcomes in the graph with treatments removed.
    pub ystar: VertexSet,
    /// Variables summed out of the final functional: `Y* \ Y`.
    pub marginalize: VertexSet,
    /// Districts of `G[Y*]` with fixing orders, sorted by district.
    /// Complete only when identified.
    pub district_plans: Vec<DistrictPlan>,
    /// Districts of `G[Y*]` that no valid fixing sequence reaches.
    pub failed_districts: Vec<VertexSet>,
}

impl IdentificationResult {
    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    /// The functional expression tree; `None` when not identified.
    pub fn functional(&self) -> Option<Functional> {
        if !self.identified {
            return None;
        }
        let product = Functional::Product(
            self.district_plans
                .iter()
                .map(|p| Functional::Fix {
                    order: p.fixing_order.clone(),
                    arg: Box::new(Functional::Joint),
                })
                .collect(),
        );
        Some(if self.marginalize.is_empty() {
            product
        } else {
            Functional::Margin {
                over: self.marginalize.iter().cloned().collect(),
                arg: Box::new(product),
            }
        })
    }

    /// Deterministic textual rendering of the functional.
    pub fn render_functional(&self) -> Result<String> {
        let expr = self
            .functional()
            .ok_or_else(|| Error::NotIdentified("no functional to render".into()))?;
        Ok(render_expr(&expr))
    }

    /// Report JSON: `{"identified", "ystar", "functional", "districts"}`.
    pub fn to_report_json(&self) -> serde_json::Value {
        json!({
            "identified": self.identified,
            "ystar": self.ystar.iter().collect::<Vec<_>>(),
            "functional": self.render_functional().unwrap_or_default(),
            "districts": self.district_plans.iter().map(|p| json!({
                "district": p.district.iter().collect::<Vec<_>>(),
                "fix_order": p.fixing_order,
            })).collect::<Vec<_>>(),
        })
    }
}

fn render_expr(expr: &Functional) -> String {
    match expr {
        Functional::Joint => "p(V)".to_string(),
        Functional::Fix { order, arg } => {
            format!("φ_{{{}}}({};G)", order.join(","), render_expr(arg))
        }
        Functional::Product(factors) => factors
            .iter()
            .map(render_expr)
            .collect::<Vec<_>>()
            .join(" "),
        Functional::Margin { over, arg } => {
            format!("Σ {} {}", over.join(","), render_expr(arg))
        }
    }
}

/// The one-line identification algorithm for `p(Y(a))` on an ADMG.
///
/// `treatments` may be empty, in which case the result is the (always
/// identified) marginal of `outcomes`.
pub fn one_line_id(
    g: &MixedGraph,
    treatments: &VertexSet,
    outcomes: &VertexSet,
) -> Result<IdentificationResult> {
    if !g.validate_class(GraphClass::Admg) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Admg).join("; "),
        ));
    }
    if outcomes.is_empty() {
        return Err(Error::InvalidQuery("outcomes must be nonempty".into()));
    }
    for v in treatments.iter().chain(outcomes) {
        if !g.contains(v) {
            return Err(Error::InvalidQuery(format!("unknown vertex `{v}`")));
        }
    }
    if treatments.intersection(outcomes).next().is_some() {
        return Err(Error::InvalidQuery(
            "treatments and outcomes must be disjoint".into(),
        ));
    }

    let rest: VertexSet = g
        .vertex_set()
        .difference(treatments)
        .cloned()
        .collect();
    let g_rest = g.subgraph(&rest)?;
    let ystar = g_rest.ancestors(outcomes)?;
    let g_ystar = g.subgraph(&ystar)?;

    let mut district_plans = Vec::new();
    let mut failed = Vec::new();
    for district in g_ystar.districts() {
        match reach_set(g, &district)? {
            Some(order) => district_plans.push(DistrictPlan { district, fixing_order: order }),
            None => failed.push(district),
        }
    }
    district_plans.sort_by(|a, b| a.district.cmp(&b.district));
    let identified = failed.is_empty();
    let marginalize: VertexSet = ystar.difference(outcomes).cloned().collect();

    Ok(IdentificationResult {
        graph: g.clone(),
        identified,
        treatments: treatments.clone(),
        outcomes: outcomes.clone(),
        ystar,
        marginalize,
        district_plans,
        failed_districts: failed,
    })
}

/// Numeric evaluation of an identifying functional against a joint table.
#[derive(Debug, Clone)]
pub struct Evaluated {
    /// Interventional distribution: outcomes `Y`, contexts `A`.
    pub distribution: TabularKernel,
    pub warnings: Vec<String>,
}

/// Applies each district's fixing chain to `p`, multiplies the resulting
/// kernels, sums out `Y* \ Y`, and drops context variables other than the
/// treatments (the product cannot depend on them when the effect is
/// identified). Returns `p(Y(a))` indexed by treatment values.
pub fn evaluate_functional(
    r: &IdentificationResult,
    p: &TabularKernel,
) -> Result<Evaluated> {
    if !r.identified {
        return Err(Error::NotIdentified(format!(
            "districts {:?} are not reachable",
            r.failed_districts
        )));
    }
    if p.outcome_vars() != r.graph.vertex_set() || !p.context_vars().is_empty() {
        return Err(Error::ShapeMismatch(
            "expected a joint distribution over the graph vertices".into(),
        ));
    }

    let mut warnings = Vec::new();
    let mut product: Option<TabularKernel> = None;
    for plan in &r.district_plans {
        let mut kernel = p.clone();
        let mut cadmg = Cadmg::from_admg(&r.graph)?;
        for v in &plan.fixing_order {
            kernel = fix_kernel(&kernel, v, &cadmg, &mut warnings)?;
            cadmg = cadmg.fix(v)?;
        }
        product = Some(match product {
            None => kernel,
            Some(acc) => acc.multiply(&kernel)?,
        });
    }
    // With no districts (Y* empty cannot happen: outcomes are nonempty), the
    // product is always present.
    let product = product.ok_or_else(|| Error::Internal("empty district product".into()))?;

    let summed = product.marginalize_outcomes(&r.marginalize)?;
    // Remaining variables: outcomes Y, contexts (V \ Y*). Keep treatments as
    // contexts; evaluate other contexts at their first level, on which the
    // kernel does not depend.
    let mut out = summed;
    let drop_vars: Vec<String> = out
        .context_vars()
        .into_iter()
        .filter(|v| !r.treatments.contains(v))
        .collect();
    for v in drop_vars {
        out = out.restrict(&v, 0)?;
    }
    Ok(Evaluated { distribution: out, warnings })
}
