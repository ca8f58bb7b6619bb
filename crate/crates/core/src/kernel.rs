//! Dense tabular kernels q(outcomes | contexts) over discrete variables, and
//! the kernel-level fixing operation.
//!
//! A kernel stores one probability per full assignment of its variables; the
//! value at an assignment is the conditional probability of the outcome part
//! given the context part. Fixing divides by a conditional derived from the
//! kernel itself and flips the fixed variable's role to context. Division of
//! zero by zero yields zero and records a warning rather than a NaN.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fixing::Cadmg;
use crate::graph::VertexSet;

/// Tolerance for per-context-cell normalization checks.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A conditional probability table over named discrete variables.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularKernel {
    vars: Vec<String>,
    card: Vec<usize>,
    is_outcome: Vec<bool>,
    table: Vec<f64>,
}

impl TabularKernel {
    /// A joint distribution: every variable is an outcome; the table must be
    /// nonnegative and sum to one.
    pub fn joint(vars: Vec<String>, card: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        let n = vars.len();
        let is_outcome = vec![true; n];
        Self::new(vars, card, is_outcome, table)
    }

    /// A general kernel. Each context cell's outcome table must be
    /// nonnegative and sum to one within [`NORMALIZATION_TOL`].
    pub fn new(
        vars: Vec<String>,
        card: Vec<usize>,
        is_outcome: Vec<bool>,
        table: Vec<f64>,
    ) -> Result<Self> {
        if vars.len() != card.len() || vars.len() != is_outcome.len() {
            return Err(Error::ShapeMismatch(
                "vars, cardinalities, and roles must align".into(),
            ));
        }
        let mut sorted = vars.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::ShapeMismatch("duplicate variable name".into()));
        }
        if card.iter().any(|&c| c < 1) {
            return Err(Error::ShapeMismatch("cardinalities must be at least 1".into()));
        }
        let size: usize = card.iter().product();
        if table.len() != size {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, expected {}",
                table.len(),
                size
            )));
        }
        if table.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::ShapeMismatch("probabilities must be finite and nonnegative".into()));
        }
        let k = TabularKernel { vars, card, is_outcome, table };
        let gap = k.normalization_gap();
        if gap > NORMALIZATION_TOL {
            return Err(Error::ShapeMismatch(format!(
                "kernel cells deviate from normalization by {gap:.3e}"
            )));
        }
        Ok(k)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cardinality(&self, var: &str) -> Result<usize> {
        Ok(self.card[self.var_pos(var)?])
    }

    pub fn outcome_vars(&self) -> VertexSet {
        self.vars
            .iter()
            .zip(&self.is_outcome)
            .filter(|(_, &o)| o)
            .map(|(v, _)| v.clone())
            .collect()
    }

    pub fn context_vars(&self) -> VertexSet {
        self.vars
            .iter()
            .zip(&self.is_outcome)
            .filter(|(_, &o)| !o)
            .map(|(v, _)| v.clone())
            .collect()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn var_pos(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVertex(var.to_string()))
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.card.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.card[i + 1];
        }
        s
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    fn encode(&self, values: &[usize]) -> usize {
        let strides = self.strides();
        values.iter().zip(&strides).map(|(v, s)| v * s).sum()
    }

    /// Value at a full assignment given as `{var: value}`.
    pub fn value_at(&self, assignment: &BTreeMap<String, usize>) -> Result<f64> {
        let mut values = vec![0usize; self.vars.len()];
        for (i, var) in self.vars.iter().enumerate() {
            let v = assignment
                .get(var)
                .copied()
                .ok_or_else(|| Error::InvalidAssignment(format!("missing value for `{var}`")))?;
            if v >= self.card[i] {
                return Err(Error::InvalidAssignment(format!(
                    "value {v} out of range for `{var}`"
                )));
            }
            values[i] = v;
        }
        Ok(self.table[self.encode(&values)])
    }

    /// For each cell, the sum of the table over the subset of outcome
    /// variables `over`, aligned with the original indexing.
    fn aligned_sum_over(&self, over: &[usize]) -> Vec<f64> {
        let strides = self.strides();
        let mut sums = vec![0.0f64; self.table.len()];
        // Group key: index with `over` coordinates zeroed.
        for (idx, &p) in self.table.iter().enumerate() {
            let mut key = idx;
            for &o in over {
                let v = (idx / strides[o]) % self.card[o];
                key -= v * strides[o];
            }
            sums[key] += p;
        }
        for idx in 0..self.table.len() {
            let mut key = idx;
            for &o in over {
                let v = (idx / strides[o]) % self.card[o];
                key -= v * strides[o];
            }
            if key != idx {
                sums[idx] = sums[key];
            }
        }
        sums
    }

    /// Max deviation of any context cell's outcome mass from one.
    pub fn normalization_gap(&self) -> f64 {
        let outcomes: Vec<usize> = (0..self.vars.len()).filter(|&i| self.is_outcome[i]).collect();
        let sums = self.aligned_sum_over(&outcomes);
        sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Sums out a set of outcome variables, removing them from the table.
    pub fn marginalize_outcomes(&self, over: &VertexSet) -> Result<TabularKernel> {
        let mut over_pos = Vec::new();
        for v in over {
            let p = self.var_pos(v)?;
            if !self.is_outcome[p] {
                return Err(Error::ShapeMismatch(format!(
                    "cannot marginalize context variable `{v}`"
                )));
            }
            over_pos.push(p);
        }
        let keep: Vec<usize> =
            (0..self.vars.len()).filter(|i| !over_pos.contains(i)).collect();
        let new_vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let new_card: Vec<usize> = keep.iter().map(|&i| self.card[i]).collect();
        let new_roles: Vec<bool> = keep.iter().map(|&i| self.is_outcome[i]).collect();
        let size: usize = new_card.iter().product();
        let mut table = vec![0.0f64; size];
        let strides = self.strides();
        let mut new_strides = vec![1usize; keep.len()];
        for i in (0..keep.len().saturating_sub(1)).rev() {
            new_strides[i] = new_strides[i + 1] * new_card[i + 1];
        }
        for (idx, &p) in self.table.iter().enumerate() {
            let mut out_idx = 0usize;
            for (k, &i) in keep.iter().enumerate() {
                let v = (idx / strides[i]) % self.card[i];
                out_idx += v * new_strides[k];
            }
            table[out_idx] += p;
        }
        TabularKernel::new(new_vars, new_card, new_roles, table)
    }

    /// Slices the kernel at `var = value`, removing the variable. The
    /// variable may have either role; slicing an outcome variable
    /// renormalizes nothing (used for reading off selected cells).
    pub fn restrict(&self, var: &str, value: usize) -> Result<TabularKernel> {
        let pos = self.var_pos(var)?;
        if value >= self.card[pos] {
            return Err(Error::InvalidAssignment(format!(
                "value {value} out of range for `{var}`"
            )));
        }
        let keep: Vec<usize> = (0..self.vars.len()).filter(|&i| i != pos).collect();
        let new_vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let new_card: Vec<usize> = keep.iter().map(|&i| self.card[i]).collect();
        let new_roles: Vec<bool> = keep.iter().map(|&i| self.is_outcome[i]).collect();
        let strides = self.strides();
        let size: usize = new_card.iter().product();
        let mut table = vec![0.0f64; size];
        let mut new_strides = vec![1usize; keep.len()];
        for i in (0..keep.len().saturating_sub(1)).rev() {
            new_strides[i] = new_strides[i + 1] * new_card[i + 1];
        }
        for (idx, &p) in self.table.iter().enumerate() {
            if (idx / strides[pos]) % self.card[pos] != value {
                continue;
            }
            let mut out_idx = 0usize;
            for (k, &i) in keep.iter().enumerate() {
                let v = (idx / strides[i]) % self.card[i];
                out_idx += v * new_strides[k];
            }
            table[out_idx] = p;
        }
        Ok(TabularKernel { vars: new_vars, card: new_card, is_outcome: new_roles, table })
    }

    /// Entrywise product of kernels over the identical variable list. The
    /// outcome set of the result is the union of the factors' outcome sets,
    /// which must be disjoint.
    pub fn multiply(&self, other: &TabularKernel) -> Result<TabularKernel> {
        if self.vars != other.vars || self.card != other.card {
            return Err(Error::ShapeMismatch(
                "kernel product requires identical variable lists".into(),
            ));
        }
        let mut roles = Vec::with_capacity(self.vars.len());
        for i in 0..self.vars.len() {
            if self.is_outcome[i] && other.is_outcome[i] {
                return Err(Error::ShapeMismatch(format!(
                    "variable `{}` is an outcome of both factors",
                    self.vars[i]
                )));
            }
            roles.push(self.is_outcome[i] || other.is_outcome[i]);
        }
        let table: Vec<f64> =
            self.table.iter().zip(&other.table).map(|(a, b)| a * b).collect();
        Ok(TabularKernel { vars: self.vars.clone(), card: self.card.clone(), is_outcome: roles, table })
    }
}

/// Kernel-level fixing: `q' = q / q(v | mb(v))`, where `mb(v)` is the Markov
/// blanket of `v` in `g` (district plus district parents, minus `v`). The
/// fixed variable becomes a context variable of the result. Cells where both
/// numerator and denominator vanish yield zero and append a warning.
pub fn fix_kernel(
    q: &TabularKernel,
    v: &str,
    g: &Cadmg,
    warnings: &mut Vec<String>,
) -> Result<TabularKernel> {
    if q.outcome_vars() != g.random() {
        return Err(Error::ShapeMismatch(
            "kernel outcome variables must equal the CADMG's random vertices".into(),
        ));
    }
    if !g.fixable(v)? {
        let de = g.descendants_of(v)?;
        let dis = g.district_of(v)?;
        let overlap: Vec<String> = de.intersection(&dis).cloned().collect();
        return Err(Error::NotFixable {
            vertex: v.to_string(),
            reason: format!("descendants and district intersect in {{{}}}", overlap.join(", ")),
        });
    }

    let mb = g.markov_blanket(v)?;
    let v_pos = q.var_pos(v)?;
    let outcome_pos: Vec<usize> =
        (0..q.vars.len()).filter(|&i| q.is_outcome[i]).collect();
    // Marginalize over outcome variables outside {v} ∪ mb(v) for the
    // numerator, and additionally over v for the denominator.
    let num_over: Vec<usize> = outcome_pos
        .iter()
        .copied()
        .filter(|&i| i != v_pos && !mb.contains(&q.vars[i]))
        .collect();
    let mut den_over = num_over.clone();
    den_over.push(v_pos);

    let num = q.aligned_sum_over(&num_over);
    let den = q.aligned_sum_over(&den_over);

    let mut zero_over_zero = 0usize;
    let mut table = Vec::with_capacity(q.table.len());
    for i in 0..q.table.len() {
        // q(v | mb(v)) at this cell is num[i] / den[i].
        let cond = if den[i] > 0.0 {
            num[i] / den[i]
        } else {
            zero_over_zero += 1;
            0.0
        };
        let value = if cond > 0.0 {
            q.table[i] / cond
        } else {
            if q.table[i] > 0.0 {
                // Unreachable for consistent kernels: the numerator of the
                // conditional dominates any single cell.
                return Err(Error::Internal(format!(
                    "positive mass with zero conditional while fixing `{v}`"
                )));
            }
            0.0
        };
        table.push(value);
    }
    if zero_over_zero > 0 {
        warnings.push(format!(
            "fixing `{v}`: {zero_over_zero} cell(s) with 0/0 conditional set to 0"
        ));
    }
    let mut roles = q.is_outcome.clone();
    roles[v_pos] = false;
    Ok(TabularKernel { vars: q.vars.clone(), card: q.card.clone(), is_outcome: roles, table })
}
