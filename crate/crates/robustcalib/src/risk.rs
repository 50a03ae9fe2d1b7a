//! Class-conditional risks, their infima over margin intervals, and the
//! robust 0-1 loss and empirical risks for linear models.

use crate::error::{Error, Result};
use crate::experiment::{Dataset, LinearModel};
use crate::loss::LossSpec;
use crate::numeric::grid_min_refined;

/// Margin interval for a class-conditional-risk infimum, within the
/// attainable margin set `[-1, 1]` of unit-norm linear models on the unit
/// ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcrQuery {
    pub eta: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

impl CcrQuery {
    pub fn new(eta: f64, alpha_lo: f64, alpha_hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
        }
        if !(alpha_lo <= alpha_hi && alpha_lo >= -1.0 && alpha_hi <= 1.0) {
            return Err(Error::Domain(format!(
                "margin interval must satisfy -1 <= lo <= hi <= 1, got [{alpha_lo}, {alpha_hi}]"
            )));
        }
        Ok(CcrQuery {
            eta,
            alpha_lo,
            alpha_hi,
        })
    }
}

/// Class-conditional risk `C(alpha, eta) = eta * phi(alpha) + (1 - eta) * phi(-alpha)`.
pub fn ccr(loss: &LossSpec, alpha: f64, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    Ok(eta * loss.eval(alpha)? + (1.0 - eta) * loss.eval(-alpha)?)
}

#[inline]
pub(crate) fn ccr_unchecked(loss: &LossSpec, alpha: f64, eta: f64) -> f64 {
    eta * loss.eval_unchecked(alpha) + (1.0 - eta) * loss.eval_unchecked(-alpha)
}

/// Default fallback grid size for [`min_ccr`].
pub const MIN_CCR_GRID: usize = 4001;

/// Infimum of the class-conditional risk over the query interval.
///
/// For bounded, nonincreasing, quasiconcave-even losses the infimum over any
/// subinterval of `[-1, 1]` is attained at one of the interval's endpoints,
/// so only two evaluations are needed. Other losses fall back to a dense
/// grid (4001 points) plus golden-section refinement of the best bracket to
/// an argument tolerance of 1e-10.
///
/// Returns `(value, argmin)`.
pub fn min_ccr(loss: &LossSpec, query: &CcrQuery) -> Result<(f64, f64)> {
    // Re-validate (queries are also constructible by struct literal).
    let query = CcrQuery::new(query.eta, query.alpha_lo, query.alpha_hi)?;
    Ok(min_ccr_on(
        loss,
        query.eta,
        query.alpha_lo,
        query.alpha_hi,
        MIN_CCR_GRID,
    ))
}

/// Internal worker for [`min_ccr`] with a configurable fallback grid size;
/// inputs are assumed valid.
pub(crate) fn min_ccr_on(loss: &LossSpec, eta: f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    if loss.quasiconcave_even_hint() && loss.is_nonincreasing() {
        let v_lo = ccr_unchecked(loss, lo, eta);
        let v_hi = ccr_unchecked(loss, hi, eta);
        if v_hi <= v_lo {
            (v_hi, hi)
        } else {
            (v_lo, lo)
        }
    } else {
        let (x, v) = grid_min_refined(|a| ccr_unchecked(loss, a, eta), lo, hi, grid, 1e-10);
        (v, x)
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The robust 0-1 loss of a linear scorer `x -> w . x + b` at `(x, y)` under
/// worst-case L2 perturbations of `x` with radius `gamma`:
/// returns 1 iff `y * (w . x + b) <= gamma * ||w||`.
///
/// The `||w||` factor makes the rule invariant to positive rescaling of
/// `(w, b)`; the perturbation attacks the features only, never the bias.
pub fn robust_loss_linear(
    weights: &[f64],
    bias: f64,
    x: &[f64],
    y: f64,
    gamma: f64,
) -> Result<f64> {
    if weights.len() != x.len() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {} weights vs {} features",
            weights.len(),
            x.len()
        )));
    }
    let wnorm = l2_norm(weights);
    if !(wnorm > 0.0) {
        return Err(Error::Domain("weight vector must be nonzero".into()));
    }
    if gamma < 0.0 {
        return Err(Error::Domain(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    if l2_norm(x) > 1.0 + 1e-9 {
        return Err(Error::Domain(
            "feature vector must lie in the closed unit ball".into(),
        ));
    }
    if y != 1.0 && y != -1.0 {
        return Err(Error::Domain(format!("label must be +1 or -1, got {y}")));
    }
    let margin = y * (dot(weights, x) + bias);
    Ok(if margin <= gamma * wnorm { 1.0 } else { 0.0 })
}

fn check_model_dataset(model: &LinearModel, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Domain("dataset is empty".into()));
    }
    if model.weights.len() != data.dim() {
        return Err(Error::Domain(format!(
            "model dimension {} does not match dataset dimension {}",
            model.weights.len(),
            data.dim()
        )));
    }
    if !(l2_norm(&model.weights) > 0.0) {
        return Err(Error::Domain("weight vector must be nonzero".into()));
    }
    Ok(())
}

/// Mean robust 0-1 loss of `model` over `data` at budget `gamma`.
pub fn robust_risk(model: &LinearModel, data: &Dataset, gamma: f64) -> Result<f64> {
    check_model_dataset(model, data)?;
    let mut total = 0.0;
    for (x, y) in data.iter() {
        total += robust_loss_linear(&model.weights, model.bias, x, y, gamma)?;
    }
    Ok(total / data.len() as f64)
}

/// Mean plain 0-1 loss (`1{y f(x) <= 0}`) of `model` over `data`.
pub fn zero_one_risk(model: &LinearModel, data: &Dataset) -> Result<f64> {
    check_model_dataset(model, data)?;
    let mut total = 0usize;
    for (x, y) in data.iter() {
        if y * (dot(&model.weights, x) + model.bias) <= 0.0 {
            total += 1;
        }
    }
    Ok(total as f64 / data.len() as f64)
}

/// Fraction of points lying within distance `gamma` of the decision
/// hyperplane: `|w . x + b| <= gamma * ||w||`, irrespective of the label.
pub fn vulnerable_fraction(model: &LinearModel, data: &Dataset, gamma: f64) -> Result<f64> {
    check_model_dataset(model, data)?;
    if gamma < 0.0 {
        return Err(Error::Domain(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    let wnorm = l2_norm(&model.weights);
    let mut total = 0usize;
    for (x, _) in data.iter() {
        if (dot(&model.weights, x) + model.bias).abs() <= gamma * wnorm {
            total += 1;
        }
    }
    Ok(total as f64 / data.len() as f64)
}

/// Mean surrogate risk of `model` over `data` on margins `y * (w . x + b)`.
pub fn surrogate_risk(loss: &LossSpec, model: &LinearModel, data: &Dataset) -> Result<f64> {
    check_model_dataset(model, data)?;
    let mut total = 0.0;
    for (x, y) in data.iter() {
        total += loss.eval(y * (dot(&model.weights, x) + model.bias))?;
    }
    Ok(total / data.len() as f64)
}
