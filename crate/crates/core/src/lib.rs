//! Causal inference with mixed graphs.
//!
//! The pipeline runs from model specification to effect estimation:
//!
//! - [`graph`] — mixed graphs (directed, bidirected, undirected edges),
//!   class validation, genealogical queries, districts, DOT and JSON.
//! - [`separation`] — m-separation on ADMGs and separation on undirected
//!   graphs.
//! - [`fixing`], [`intrinsic`], [`identify`], [`kernel`] — the fixing
//!   calculus, intrinsic sets, the one-line identification algorithm, and
//!   numeric evaluation of identifying functionals on tabular
//!   distributions.
//! - [`linear`] — linear Gaussian structural equation models with correlated
//!   errors, fitted by residual iterative conditional fitting (RICF).
//! - [`binary`] — binary nested Markov models in the Möbius
//!   parameterization, fitted by coordinate descent.
//! - [`effect`] — semiparametric estimation of average causal effects:
//!   IPW / g-formula / AIPW for adjustment-fixable treatments, primal and
//!   dual IPW for primal-fixable ones, a nested plug-in fallback, strategy
//!   selection, and bootstrap intervals.
//!
//! Graphs and fitted models are immutable and safe to share across threads;
//! the `parallel` feature (default) runs bootstrap replicates and joint
//! reconstruction on rayon.

pub mod binary;
pub mod data;
pub mod effect;
pub mod error;
pub mod fixing;
pub mod graph;
pub mod identify;
pub mod intrinsic;
pub mod kernel;
pub mod linear;
pub mod par;
pub mod separation;

pub use data::{BinaryCounts, Dataset};
pub use error::{Error, Result};
pub use fixing::Cadmg;
pub use graph::{vset, Genealogy, GraphClass, MixedGraph, RankDir, VertexSet};
pub use identify::{one_line_id, IdentificationResult};
pub use intrinsic::{intrinsic_catalog, IntrinsicCatalog};
pub use kernel::TabularKernel;
pub use separation::{m_separated, u_separated, SeparationQuery};
