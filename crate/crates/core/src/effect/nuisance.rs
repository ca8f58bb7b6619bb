//! Pluggable conditional models for estimator nuisances.
//!
//! The defaults are deliberately simple: smoothed frequency tables when the
//! response and all predictors are binary, otherwise logistic regression for
//! binary responses and linear regression for continuous ones. Anything
//! implementing [`ConditionalModel`] can be substituted.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Probability floor/ceiling for fitted probabilities.
const PROB_EPS: f64 = 1e-6;

/// A conditional model of one response column given predictor columns.
pub trait ConditionalModel: Send + Sync {
    /// Fits the model; `predictors` is row-major, one inner slice per row.
    fn fit(&mut self, response: &[f64], predictors: &[Vec<f64>]) -> Result<()>;
    /// Conditional mean of the response per row.
    fn predict_mean(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>>;
    /// `P(response = 1 | row)` for binary responses.
    fn predict_probability(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>>;
}

/// Model families available to the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Frequency tables for all-binary data, regression otherwise.
    Auto,
    /// Laplace-smoothed frequency table (binary response and predictors).
    Frequency,
    /// Logistic regression fitted by iteratively reweighted least squares.
    Logistic,
    /// Ordinary least squares with intercept.
    Linear,
    /// Intercept-only model; useful for misspecification checks.
    Mean,
}

/// Which model to use for conditional probability factors and for the
/// outcome regression.
#[derive(Debug, Clone, Copy)]
pub struct NuisanceSpec {
    /// Model for `p(v | mp(v))` factors (propensities, district factors).
    pub conditionals: ModelKind,
    /// Model for the outcome regression `E[Y | T, mp(T)]`.
    pub outcome: ModelKind,
}

impl Default for NuisanceSpec {
    fn default() -> Self {
        NuisanceSpec { conditionals: ModelKind::Auto, outcome: ModelKind::Auto }
    }
}

impl ModelKind {
    /// Resolves `Auto` against the data at hand and builds the model.
    pub fn build(self, response_binary: bool, predictors_binary: bool) -> Box<dyn ConditionalModel> {
        match self {
            ModelKind::Auto => {
                if response_binary && predictors_binary {
                    Box::new(FrequencyModel::new(1.0))
                } else if response_binary {
                    Box::new(LogisticModel::default())
                } else {
                    Box::new(LinearModel::default())
                }
            }
            ModelKind::Frequency => Box::new(FrequencyModel::new(1.0)),
            ModelKind::Logistic => Box::new(LogisticModel::default()),
            ModelKind::Linear => Box::new(LinearModel::default()),
            ModelKind::Mean => Box::new(MeanModel::default()),
        }
    }
}

/// Smoothed conditional frequency table over binary predictor cells. Each
/// cell rate is shrunk toward the marginal response rate with pseudo-count
/// `alpha`, so degenerate responses stay exactly degenerate (up to the
/// probability clamp) and empty cells fall back to the marginal.
#[derive(Debug, Clone)]
pub struct FrequencyModel {
    alpha: f64,
    marginal: f64,
    cells: HashMap<Vec<u8>, (f64, f64)>,
}

impl FrequencyModel {
    pub fn new(alpha: f64) -> Self {
        FrequencyModel { alpha, marginal: 0.5, cells: HashMap::new() }
    }

    fn key(row: &[f64]) -> Result<Vec<u8>> {
        row.iter()
            .map(|&x| {
                if x == 0.0 {
                    Ok(0u8)
                } else if x == 1.0 {
                    Ok(1u8)
                } else {
                    Err(Error::ShapeMismatch(format!(
                        "frequency model requires binary predictors, got {x}"
                    )))
                }
            })
            .collect()
    }
}

impl ConditionalModel for FrequencyModel {
    fn fit(&mut self, response: &[f64], predictors: &[Vec<f64>]) -> Result<()> {
        if response.len() != predictors.len() || response.is_empty() {
            return Err(Error::ShapeMismatch("response/predictor length mismatch".into()));
        }
        self.cells.clear();
        for (y, row) in response.iter().zip(predictors) {
            if *y != 0.0 && *y != 1.0 {
                return Err(Error::ShapeMismatch(
                    "frequency model requires a binary response".into(),
                ));
            }
            let entry = self.cells.entry(Self::key(row)?).or_insert((0.0, 0.0));
            entry.0 += *y;
            entry.1 += 1.0;
        }
        self.marginal = response.iter().sum::<f64>() / response.len() as f64;
        Ok(())
    }

    fn predict_mean(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.predict_probability(rows)
    }

    fn predict_probability(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter()
            .map(|row| {
                let (ones, total) = self
                    .cells
                    .get(&Self::key(row)?)
                    .copied()
                    .unwrap_or((0.0, 0.0));
                let denom = total + self.alpha;
                let p = if denom > 0.0 {
                    (ones + self.alpha * self.marginal) / denom
                } else {
                    self.marginal
                };
                Ok(p.clamp(PROB_EPS, 1.0 - PROB_EPS))
            })
            .collect()
    }
}

fn design_with_intercept(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, k + 1, |r, c| if c == 0 { 1.0 } else { rows[r][c - 1] })
}

/// Logistic regression via IRLS.
#[derive(Debug, Clone, Default)]
pub struct LogisticModel {
    coef: Option<DVector<f64>>,
}

impl ConditionalModel for LogisticModel {
    fn fit(&mut self, response: &[f64], predictors: &[Vec<f64>]) -> Result<()> {
        if response.len() != predictors.len() || response.is_empty() {
            return Err(Error::ShapeMismatch("response/predictor length mismatch".into()));
        }
        if response.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::ShapeMismatch(
                "logistic regression requires a binary response".into(),
            ));
        }
        let x = design_with_intercept(predictors);
        let y = DVector::from_column_slice(response);
        let k = x.ncols();
        let mut beta = DVector::zeros(k);
        for _ in 0..50 {
            let eta = &x * &beta;
            let mu: DVector<f64> = eta.map(|e| 1.0 / (1.0 + (-e).exp()));
            let w: DVector<f64> = mu.map(|m| (m * (1.0 - m)).max(1e-10));
            // X^T W X beta_new = X^T W (eta + (y - mu) / w)
            let mut xtwx = DMatrix::zeros(k, k);
            let mut xtwz = DVector::zeros(k);
            for r in 0..x.nrows() {
                let z = eta[r] + (y[r] - mu[r]) / w[r];
                for a in 0..k {
                    xtwz[a] += x[(r, a)] * w[r] * z;
                    for b in 0..k {
                        xtwx[(a, b)] += x[(r, a)] * w[r] * x[(r, b)];
                    }
                }
            }
            // Ridge jitter keeps separated data solvable.
            for a in 0..k {
                xtwx[(a, a)] += 1e-8;
            }
            let next = Cholesky::new(xtwx)
                .map(|c| c.solve(&xtwz))
                .ok_or_else(|| Error::SingularCovariance("IRLS normal matrix".into()))?;
            let delta = (&next - &beta).amax();
            beta = next;
            if delta < 1e-10 {
                break;
            }
        }
        self.coef = Some(beta);
        Ok(())
    }

    fn predict_mean(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.predict_probability(rows)
    }

    fn predict_probability(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let beta = self
            .coef
            .as_ref()
            .ok_or_else(|| Error::Estimation("logistic model not fitted".into()))?;
        Ok(rows
            .iter()
            .map(|row| {
                let mut eta = beta[0];
                for (j, v) in row.iter().enumerate() {
                    eta += beta[j + 1] * v;
                }
                (1.0 / (1.0 + (-eta).exp())).clamp(PROB_EPS, 1.0 - PROB_EPS)
            })
            .collect())
    }
}

/// Ordinary least squares with intercept.
#[derive(Debug, Clone, Default)]
pub struct LinearModel {
    coef: Option<DVector<f64>>,
}

impl ConditionalModel for LinearModel {
    fn fit(&mut self, response: &[f64], predictors: &[Vec<f64>]) -> Result<()> {
        if response.len() != predictors.len() || response.is_empty() {
            return Err(Error::ShapeMismatch("response/predictor length mismatch".into()));
        }
        let x = design_with_intercept(predictors);
        let y = DVector::from_column_slice(response);
        let mut xtx = x.transpose() * &x;
        for a in 0..xtx.nrows() {
            xtx[(a, a)] += 1e-10;
        }
        let xty = x.transpose() * y;
        let beta = Cholesky::new(xtx)
            .map(|c| c.solve(&xty))
            .ok_or_else(|| Error::SingularCovariance("OLS normal matrix".into()))?;
        self.coef = Some(beta);
        Ok(())
    }

    fn predict_mean(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let beta = self
            .coef
            .as_ref()
            .ok_or_else(|| Error::Estimation("linear model not fitted".into()))?;
        Ok(rows
            .iter()
            .map(|row| {
                let mut v = beta[0];
                for (j, x) in row.iter().enumerate() {
                    v += beta[j + 1] * x;
                }
                v
            })
            .collect())
    }

    fn predict_probability(&self, _rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        Err(Error::Estimation(
            "linear regression does not produce probabilities".into(),
        ))
    }
}

/// Intercept-only model: predicts the sample mean everywhere.
#[derive(Debug, Clone, Default)]
pub struct MeanModel {
    mean: Option<f64>,
}

impl ConditionalModel for MeanModel {
    fn fit(&mut self, response: &[f64], _predictors: &[Vec<f64>]) -> Result<()> {
        if response.is_empty() {
            return Err(Error::EmptyData);
        }
        self.mean = Some(response.iter().sum::<f64>() / response.len() as f64);
        Ok(())
    }

    fn predict_mean(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let m = self.mean.ok_or_else(|| Error::Estimation("mean model not fitted".into()))?;
        Ok(vec![m; rows.len()])
    }

    fn predict_probability(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let m = self.mean.ok_or_else(|| Error::Estimation("mean model not fitted".into()))?;
        Ok(vec![m.clamp(PROB_EPS, 1.0 - PROB_EPS); rows.len()])
    }
}
