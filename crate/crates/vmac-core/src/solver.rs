//! Shared solver plumbing: error type, weight-difference decomposition, and
//! bisection on monotone decreasing functions.

use crate::rate::ModelError;
use std::fmt;

#[derive(Debug)]
pub enum SolveError {
    /// The feasible set is empty or could not be entered.
    Infeasible { detail: String },
    NumericalFailure { detail: String },
    /// Dual variable outside its admissible range.
    BadDualRange { value: f64 },
    Model(ModelError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Infeasible { detail } => write!(f, "infeasible problem: {detail}"),
            SolveError::NumericalFailure { detail } => write!(f, "numerical failure: {detail}"),
            SolveError::BadDualRange { value } => {
                write!(f, "dual variable {value} outside [0, 1)")
            }
            SolveError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<ModelError> for SolveError {
    fn from(e: ModelError) -> Self {
        SolveError::Model(e)
    }
}

impl From<crate::linalg::LinalgError> for SolveError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        SolveError::Model(ModelError::Linalg(e))
    }
}

/// Weights sorted into decode order with the cumulative differences used by
/// the telescoped weighted-sum-rate objective.
#[derive(Debug, Clone)]
pub struct WeightDecomposition {
    /// Users in ascending weight order (first entry decoded first).
    pub order: Vec<usize>,
    /// `diffs[k] = w_(k) - w_(k-1)` over the sorted weights, with
    /// `w_(-1) = 0`; all nonnegative.
    pub diffs: Vec<f64>,
    /// Largest (perturbed) weight.
    pub top: f64,
}

/// Sorts weights ascending (ties by user index) and forms the consecutive
/// differences. Exact ties among positive weights are perturbed upward by at
/// most 1e-9 relative so that every difference is strictly positive, which
/// keeps the per-term log coefficients nondegenerate without moving the
/// argmax.
pub fn weight_decomposition(weights: &[f64]) -> Result<WeightDecomposition, ModelError> {
    for (j, &w) in weights.iter().enumerate() {
        if w.is_nan() || w < 0.0 {
            return Err(ModelError::NegativeWeight { index: j });
        }
    }
    let order = crate::rate::ascending_weight_order(weights);
    let mut sorted: Vec<f64> = order.iter().map(|&j| weights[j]).collect();
    for k in 1..sorted.len() {
        if sorted[k] <= sorted[k - 1] {
            sorted[k] = sorted[k - 1] * (1.0 + 1e-12);
        }
    }
    let mut diffs = Vec::with_capacity(sorted.len());
    let mut prev = 0.0;
    for &w in &sorted {
        diffs.push(w - prev);
        prev = w;
    }
    Ok(WeightDecomposition { order, diffs, top: prev })
}

/// Bisection for `f(x) = target` where `f` is continuous and strictly
/// decreasing on `(lo, hi)`. Terminates when `|f(x) - target| <= tol`;
/// endpoints are never evaluated.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    debug_assert!(lo < hi);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - target).abs() <= tol {
            return mid;
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}
