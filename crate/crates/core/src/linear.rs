//! Linear Gaussian structural equation models with correlated errors on an
//! ADMG.
//!
//! The model is `X = B X + ε`, `ε ~ N(0, Ω)`, where `B` is supported on the
//! directed edges (entry `(i, j)` is the coefficient on `j -> i`) and the
//! off-diagonal support of `Ω` is the bidirected edges. Maximum likelihood
//! estimates come from residual iterative conditional fitting (RICF): each
//! sweep solves, per vertex, a least-squares regression on its parents and
//! on pseudo-variables built from the current residual covariance, which
//! never decreases the likelihood. On a DAG the sibling machinery
//! disappears and one sweep reproduces per-vertex OLS exactly.
//!
//! Data are mean-centered internally; means are not model parameters.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{GraphClass, MixedGraph, VertexSet};

/// Default sup-norm tolerance on parameter changes between sweeps.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default maximum number of RICF sweeps.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Fitted or specified parameters of a linear Gaussian SEM.
#[derive(Debug, Clone)]
pub struct SemParams {
    graph: MixedGraph,
    /// Directed coefficients; entry `(i, j)` multiplies `x_j` in the
    /// equation for `x_i`. Support is the directed edge set.
    b: DMatrix<f64>,
    /// Error covariance; off-diagonal support is the bidirected edge set.
    omega: DMatrix<f64>,
}

impl SemParams {
    pub fn new(graph: MixedGraph, b: DMatrix<f64>, omega: DMatrix<f64>) -> Result<Self> {
        if !graph.validate_class(GraphClass::Admg) {
            return Err(Error::WrongGraphClass(
                graph.class_violations(GraphClass::Admg).join("; "),
            ));
        }
        let p = graph.vertex_count();
        if b.nrows() != p || b.ncols() != p || omega.nrows() != p || omega.ncols() != p {
            return Err(Error::ShapeMismatch(format!(
                "matrices must be {p}x{p} to match the graph"
            )));
        }
        for i in 0..p {
            for j in 0..p {
                let child = graph.vertices()[i].clone();
                let parent = graph.vertices()[j].clone();
                if b[(i, j)] != 0.0 && !graph.has_di_edge(&parent, &child) {
                    return Err(Error::ShapeMismatch(format!(
                        "B[{child}, {parent}] is nonzero without an edge {parent} -> {child}"
                    )));
                }
                if i != j
                    && omega[(i, j)] != 0.0
                    && !graph.has_bi_edge(&parent, &child)
                {
                    return Err(Error::ShapeMismatch(format!(
                        "Omega[{child}, {parent}] is nonzero without a bidirected edge"
                    )));
                }
                if (omega[(i, j)] - omega[(j, i)]).abs() > 1e-12 {
                    return Err(Error::ShapeMismatch("Omega must be symmetric".into()));
                }
            }
        }
        if Cholesky::new(omega.clone()).is_none() {
            return Err(Error::NotPositiveDefinite("Omega".into()));
        }
        Ok(SemParams { graph, b, omega })
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    /// Coefficient on the edge `parent -> child`.
    pub fn coefficient(&self, parent: &str, child: &str) -> Result<f64> {
        Ok(self.b[(self.graph.idx(child)?, self.graph.idx(parent)?)])
    }

    /// Error covariance between two vertices.
    pub fn error_covariance(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.omega[(self.graph.idx(a)?, self.graph.idx(b)?)])
    }

    /// Implied covariance `Σ = (I - B)^{-1} Ω (I - B)^{-T}`.
    pub fn implied_covariance(&self) -> Result<DMatrix<f64>> {
        let p = self.b.nrows();
        let i_minus_b = DMatrix::identity(p, p) - &self.b;
        let inv = i_minus_b
            .try_inverse()
            .ok_or_else(|| Error::SingularCovariance("I - B is singular".into()))?;
        Ok(&inv * &self.omega * inv.transpose())
    }

    /// Total effect of a single treatment on a single outcome: the sum over
    /// all directed paths of the product of edge coefficients.
    pub fn total_effect(&self, treatments: &VertexSet, outcomes: &VertexSet) -> Result<f64> {
        if treatments.len() != 1 || outcomes.len() != 1 {
            return Err(Error::InvalidQuery(
                "total_effect supports a single treatment and a single outcome".into(),
            ));
        }
        let t = self.graph.idx(treatments.iter().next().unwrap())?;
        let y = self.graph.idx(outcomes.iter().next().unwrap())?;
        if t == y {
            return Err(Error::InvalidQuery(
                "treatment and outcome must differ".into(),
            ));
        }
        // Depth-first accumulation over the acyclic directed part.
        fn walk(params: &SemParams, v: usize, y: usize, acc: f64, total: &mut f64) {
            if v == y {
                *total += acc;
                return;
            }
            for c in params.graph.child_idxs(v) {
                walk(params, c, y, acc * params.b[(c, v)], total);
            }
        }
        let mut total = 0.0;
        walk(self, t, y, 1.0, &mut total);
        Ok(total)
    }

    /// Draws `n` samples of `X = (I - B)^{-1} ε`, `ε ~ N(0, Ω)`; reproducible
    /// for a fixed seed. Columns follow the graph's vertex order.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n < 2 {
            return Err(Error::ShapeMismatch("need at least 2 samples".into()));
        }
        let p = self.b.nrows();
        let chol = Cholesky::new(self.omega.clone())
            .ok_or_else(|| Error::NotPositiveDefinite("Omega".into()))?;
        let l = chol.l();
        let order = self.graph.topological_order()?;
        let order_idx: Vec<usize> =
            order.iter().map(|v| self.graph.idx(v)).collect::<Result<_>>()?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = vec![0.0f64; n * p];
        let mut z = DVector::zeros(p);
        let mut x = vec![0.0f64; p];
        for row in 0..n {
            for k in 0..p {
                z[k] = StandardNormal.sample(&mut rng);
            }
            let eps = &l * &z;
            for &v in &order_idx {
                let mut val = eps[v];
                for pa in self.graph.parent_idxs(v) {
                    val += self.b[(v, pa)] * x[pa];
                }
                x[v] = val;
            }
            data[row * p..(row + 1) * p].copy_from_slice(&x);
        }
        Dataset::new(self.graph.vertices().to_vec(), data)
    }
}

/// Result of an RICF fit.
#[derive(Debug, Clone)]
pub struct RicfFit {
    pub params: SemParams,
    pub converged: bool,
    pub iterations: usize,
    /// Negative log-likelihood after each sweep.
    pub nll_path: Vec<f64>,
}

fn center_columns(d: &Dataset, g: &MixedGraph) -> Result<DMatrix<f64>> {
    let n = d.nrows();
    let p = g.vertex_count();
    let mut x = DMatrix::zeros(n, p);
    for (j, v) in g.vertices().iter().enumerate() {
        let col = d.column(v)?;
        let mean = col.iter().sum::<f64>() / n as f64;
        for (i, &val) in col.iter().enumerate() {
            x[(i, j)] = val - mean;
        }
    }
    Ok(x)
}

fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    (x.transpose() * x) / n
}

/// Least squares of `y` on the columns of `design`; errors on a singular
/// normal matrix.
fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let xtx = design.transpose() * design;
    let xty = design.transpose() * y;
    Cholesky::new(xtx)
        .map(|c| c.solve(&xty))
        .ok_or_else(|| Error::SingularCovariance("singular design in RICF regression".into()))
}

/// RICF maximum likelihood fit of a linear Gaussian SEM.
///
/// Starts from `B = 0`, `Ω = I` and sweeps the vertices in topological
/// order; stops when the sup-norm parameter change over a sweep drops below
/// `tol` or after `max_iter` sweeps (then `converged = false`, best iterate
/// returned).
pub fn ricf_fit(g: &MixedGraph, d: &Dataset, tol: f64, max_iter: usize) -> Result<RicfFit> {
    if !g.validate_class(GraphClass::Admg) {
        return Err(Error::WrongGraphClass(
            g.class_violations(GraphClass::Admg).join("; "),
        ));
    }
    if tol <= 0.0 || max_iter == 0 {
        return Err(Error::InvalidQuery("tol and max_iter must be positive".into()));
    }
    d.check_matches_graph(g)?;
    let x = center_columns(d, g)?;
    let n = x.nrows();
    let p = g.vertex_count();
    let s = sample_covariance(&x);
    if Cholesky::new(s.clone()).is_none() {
        return Err(Error::SingularCovariance(
            "sample covariance is not positive definite".into(),
        ));
    }

    let order = g.topological_order()?;
    let order_idx: Vec<usize> = order.iter().map(|v| g.idx(v)).collect::<Result<_>>()?;
    let parents: Vec<Vec<usize>> = (0..p).map(|v| g.parent_idxs(v)).collect();
    let siblings: Vec<Vec<usize>> = (0..p).map(|v| g.sibling_idxs(v)).collect();

    let mut b = DMatrix::<f64>::zeros(p, p);
    let mut omega = DMatrix::<f64>::identity(p, p);
    // Vertices with no parents and no siblings have a closed-form variance
    // that never changes; set it once.
    for v in 0..p {
        if parents[v].is_empty() && siblings[v].is_empty() {
            omega[(v, v)] = s[(v, v)];
        }
    }

    let mut nll_path = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _sweep in 0..max_iter {
        iterations += 1;
        let mut max_change = 0.0f64;
        for &i in &order_idx {
            let pa = &parents[i];
            let sib = &siblings[i];
            if pa.is_empty() && sib.is_empty() {
                continue;
            }
            let y = DVector::from_iterator(n, (0..n).map(|r| x[(r, i)]));

            let (coefs, design): (DVector<f64>, DMatrix<f64>) = if sib.is_empty() {
                let mut design = DMatrix::zeros(n, pa.len());
                for (k, &j) in pa.iter().enumerate() {
                    for r in 0..n {
                        design[(r, k)] = x[(r, j)];
                    }
                }
                (least_squares(&design, &y)?, design)
            } else {
                // Residuals of the other vertices under the current B.
                let others: Vec<usize> = (0..p).filter(|&j| j != i).collect();
                let mut eps = DMatrix::zeros(n, others.len());
                for (k, &j) in others.iter().enumerate() {
                    for r in 0..n {
                        let mut e = x[(r, j)];
                        for &pj in &parents[j] {
                            e -= b[(j, pj)] * x[(r, pj)];
                        }
                        eps[(r, k)] = e;
                    }
                }
                let omega_rest = omega_submatrix(&omega, &others);
                let chol = Cholesky::new(omega_rest.clone()).ok_or_else(|| {
                    Error::SingularCovariance("Omega submatrix not positive definite".into())
                })?;
                // Pseudo-variables Z = ε_{-i} Ω_{-i,-i}^{-1}, one column per
                // sibling.
                let zfull = chol.solve(&eps.transpose()).transpose();
                let mut design = DMatrix::zeros(n, pa.len() + sib.len());
                for (k, &j) in pa.iter().enumerate() {
                    for r in 0..n {
                        design[(r, k)] = x[(r, j)];
                    }
                }
                for (k, &sj) in sib.iter().enumerate() {
                    let col = others.iter().position(|&j| j == sj).unwrap();
                    for r in 0..n {
                        design[(r, pa.len() + k)] = zfull[(r, col)];
                    }
                }
                (least_squares(&design, &y)?, design)
            };

            // Residual variance of the regression.
            let fitted = &design * &coefs;
            let resid = &y - fitted;
            let rss = resid.dot(&resid) / n as f64;

            for (k, &j) in pa.iter().enumerate() {
                let new = coefs[k];
                max_change = max_change.max((new - b[(i, j)]).abs());
                b[(i, j)] = new;
            }
            if sib.is_empty() {
                max_change = max_change.max((rss - omega[(i, i)]).abs());
                omega[(i, i)] = rss;
            } else {
                for (k, &sj) in sib.iter().enumerate() {
                    let new = coefs[pa.len() + k];
                    max_change = max_change.max((new - omega[(i, sj)]).abs());
                    omega[(i, sj)] = new;
                    omega[(sj, i)] = new;
                }
                // ω_ii = residual variance + ω_{i,-i} Ω_{-i,-i}^{-1} ω_{-i,i}.
                let others: Vec<usize> = (0..p).filter(|&j| j != i).collect();
                let omega_rest = omega_submatrix(&omega, &others);
                let chol = Cholesky::new(omega_rest).ok_or_else(|| {
                    Error::SingularCovariance("Omega submatrix not positive definite".into())
                })?;
                let w_col = DVector::from_iterator(
                    others.len(),
                    others.iter().map(|&j| omega[(i, j)]),
                );
                let solved = chol.solve(&w_col);
                let correction = w_col.dot(&solved);
                let new_var = rss + correction;
                max_change = max_change.max((new_var - omega[(i, i)]).abs());
                omega[(i, i)] = new_var;
            }
        }
        nll_path.push(nll_from_cov(&b, &omega, &s, n)?);
        if max_change < tol {
            converged = true;
            break;
        }
    }

    let params = SemParams::new(g.clone(), b, omega)?;
    Ok(RicfFit { params, converged, iterations, nll_path })
}

fn omega_submatrix(omega: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(keep.len(), keep.len(), |r, c| omega[(keep[r], keep[c])])
}

fn nll_from_cov(b: &DMatrix<f64>, omega: &DMatrix<f64>, s: &DMatrix<f64>, n: usize) -> Result<f64> {
    let p = b.nrows();
    let i_minus_b = DMatrix::identity(p, p) - b;
    let inv = i_minus_b
        .try_inverse()
        .ok_or_else(|| Error::SingularCovariance("I - B is singular".into()))?;
    let sigma = &inv * omega * inv.transpose();
    let chol = Cholesky::new(sigma.clone())
        .ok_or_else(|| Error::SingularCovariance("implied covariance".into()))?;
    let log_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let sigma_inv_s = chol.solve(s);
    let trace = sigma_inv_s.trace();
    Ok(0.5 * n as f64 * (log_det + trace))
}

/// Negative log-likelihood `(n/2)(log det Σ + tr(Σ^{-1} S))` of the data
/// under the model, with `S` the sample covariance about the mean. The
/// additive constant `(np/2) log 2π` is dropped.
pub fn neg_log_likelihood(params: &SemParams, d: &Dataset) -> Result<f64> {
    d.check_matches_graph(params.graph())?;
    let x = center_columns(d, params.graph())?;
    let s = sample_covariance(&x);
    nll_from_cov(&params.b, &params.omega, &s, d.nrows())
}
