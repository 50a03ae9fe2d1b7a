//! Numeric calibration functions, the Fenchel-Legendre biconjugate, the
//! excess-risk transform, and calibration verdicts.
//!
//! The calibration function of a surrogate `phi` with respect to the robust
//! target `1{alpha <= gamma}` over unit-norm linear models (attainable
//! margins `[-1, 1]`) is
//!
//! `delta(eps) = inf over eta of delta_bar(eps, eta)`,
//!
//! where `delta_bar` is an infimum of the surrogate's excess class-conditional
//! risk over the margins at which the target's excess risk is at least `eps`.
//! That constraint set reduces to three cases in `(eps, eta)`:
//! infeasible (empty set, infimum +inf), the band `|alpha| <= gamma`, or the
//! band united with the margins of the wrong sign.

use crate::error::{Error, Result};
use crate::loss::{LossSpec, StructuralReport};
use crate::numeric::{interp_piecewise_linear, lower_hull};
use crate::risk::min_ccr_on;
use rayon::prelude::*;
use std::fmt;

/// Default number of eta-grid nodes on `[1/2, 1]`.
pub const DEFAULT_ETA_POINTS: usize = 2001;
/// Default number of alpha-grid nodes per margin interval.
pub const DEFAULT_ALPHA_GRID: usize = 2001;
/// Threshold above which a sampled delta value counts as strictly positive.
pub const POSITIVITY_THRESHOLD: f64 = 1e-6;

/// What a [`CalibrationCurve`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// The raw calibration function `delta`.
    RawDelta,
    /// `delta` extended with the origin and truncated to its finite range.
    CheckDelta,
    /// The lower convex envelope (Fenchel-Legendre biconjugate).
    Biconjugate,
}

/// A sampled `(eps, delta(eps))` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    epsilons: Vec<f64>,
    deltas: Vec<f64>,
    kind: CurveKind,
}

impl CalibrationCurve {
    /// Build a curve, validating the grid: epsilons strictly increasing in
    /// `(0, 1]` (the [`CurveKind::CheckDelta`] and biconjugate kinds also
    /// admit 0), deltas nonnegative with `+inf` allowed.
    pub fn new(epsilons: Vec<f64>, deltas: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if epsilons.len() != deltas.len() {
            return Err(Error::Domain(format!(
                "{} epsilons but {} deltas",
                epsilons.len(),
                deltas.len()
            )));
        }
        if epsilons.is_empty() {
            return Err(Error::Domain(
                "curve must contain at least one point".into(),
            ));
        }
        let min_allowed = if kind == CurveKind::RawDelta {
            f64::MIN_POSITIVE
        } else {
            0.0
        };
        for &e in &epsilons {
            if !(e >= min_allowed && e <= 1.0) {
                return Err(Error::Domain(format!(
                    "epsilon {e} outside the curve domain"
                )));
            }
        }
        if !epsilons.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("epsilons must be strictly increasing".into()));
        }
        for &d in &deltas {
            if d.is_nan() || d < 0.0 {
                return Err(Error::Domain(format!(
                    "delta value {d} must be >= 0 or +inf"
                )));
            }
        }
        Ok(CalibrationCurve {
            epsilons,
            deltas,
            kind,
        })
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.epsilons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilons.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.epsilons
            .iter()
            .copied()
            .zip(self.deltas.iter().copied())
    }
}

/// The default evaluation grid: 97 points spanning `[0.02, 0.98]`.
pub fn default_epsilon_grid() -> Vec<f64> {
    epsilon_grid(97)
}

/// A uniform `points`-node grid spanning `[0.02, 0.98]`.
pub fn epsilon_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| 0.02 + (0.98 - 0.02) * i as f64 / (points - 1) as f64)
        .collect()
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// The inner objective `delta_bar(eps, eta)`: infimum of the surrogate's
/// excess class-conditional risk over the margin set on which the target
/// excess risk reaches `eps`, or `+inf` when that set is empty.
///
/// `alpha_grid` controls the fallback grid used for the inner infima of
/// non-quasiconcave losses (at least 2001 nodes).
pub fn delta_bar(
    loss: &LossSpec,
    gamma: f64,
    epsilon: f64,
    eta: f64,
    alpha_grid: usize,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    validate_gamma(gamma)?;
    if alpha_grid < 2001 {
        return Err(Error::Precondition(format!(
            "alpha_grid must be at least 2001, got {alpha_grid}"
        )));
    }
    Ok(delta_bar_unchecked(loss, gamma, epsilon, eta, alpha_grid))
}

fn delta_bar_unchecked(
    loss: &LossSpec,
    gamma: f64,
    epsilon: f64,
    eta: f64,
    alpha_grid: usize,
) -> f64 {
    if epsilon > eta.max(1.0 - eta) {
        return f64::INFINITY;
    }
    let (cstar, _) = min_ccr_on(loss, eta, -1.0, 1.0, alpha_grid);
    let inf = if (2.0 * eta - 1.0).abs() < epsilon {
        // Constraint set: the band |alpha| <= gamma.
        min_ccr_on(loss, eta, -gamma, gamma, alpha_grid).0
    } else {
        // Constraint set: band union wrong-sign margins. For eta > 1/2 this
        // is [-1, gamma]; for eta < 1/2 it is [-gamma, 1] (eta = 1/2 cannot
        // reach this case since epsilon > 0 = |2 eta - 1|).
        if eta >= 0.5 {
            min_ccr_on(loss, eta, -1.0, gamma, alpha_grid).0
        } else {
            min_ccr_on(loss, eta, -gamma, 1.0, alpha_grid).0
        }
    };
    (inf - cstar).max(0.0)
}

/// Numeric calibration function on an epsilon grid.
///
/// For each `eps`, minimizes `delta_bar(eps, .)` over `eta`: a uniform
/// `eta_points`-node scan of `[1/2, 1]` (the objective is symmetric about
/// `eta = 1/2`, so the lower half adds nothing) followed by golden-section
/// refinement of the best bracket to an eta tolerance of 1e-8. The three
/// eta-dependent interval infima are precomputed per eta node and shared
/// across the whole epsilon grid.
pub fn calibration_fn_numeric(
    loss: &LossSpec,
    gamma: f64,
    epsilon_grid: &[f64],
    eta_points: usize,
    alpha_grid: usize,
) -> Result<CalibrationCurve> {
    validate_gamma(gamma)?;
    if eta_points < 2001 {
        return Err(Error::Precondition(format!(
            "eta_points must be at least 2001, got {eta_points}"
        )));
    }
    if alpha_grid < 2001 {
        return Err(Error::Precondition(format!(
            "alpha_grid must be at least 2001, got {alpha_grid}"
        )));
    }
    if epsilon_grid.is_empty() {
        return Err(Error::Precondition("epsilon grid is empty".into()));
    }
    for &e in epsilon_grid {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::Domain(format!("epsilon {e} outside (0, 1]")));
        }
    }
    if !epsilon_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "epsilon grid must be strictly increasing".into(),
        ));
    }

    // Per-eta-node precomputation of the three interval infima.
    let eta_step = 0.5 / (eta_points - 1) as f64;
    let etas: Vec<f64> = (0..eta_points).map(|i| 0.5 + eta_step * i as f64).collect();
    struct NodeInfima {
        cstar: f64,
        band: f64, // over [-gamma, gamma]
        left: f64, // over [-1, gamma]
    }
    let nodes: Vec<NodeInfima> = etas
        .par_iter()
        .map(|&eta| NodeInfima {
            cstar: min_ccr_on(loss, eta, -1.0, 1.0, alpha_grid).0,
            band: min_ccr_on(loss, eta, -gamma, gamma, alpha_grid).0,
            left: min_ccr_on(loss, eta, -1.0, gamma, alpha_grid).0,
        })
        .collect();

    let deltas: Vec<f64> = epsilon_grid
        .par_iter()
        .map(|&eps| {
            let mut best = f64::INFINITY;
            let mut best_i = None;
            for (i, (&eta, node)) in etas.iter().zip(&nodes).enumerate() {
                if eps > eta {
                    continue; // infeasible: eps > max{eta, 1 - eta}
                }
                let inf = if 2.0 * eta - 1.0 < eps {
                    node.band
                } else {
                    node.left
                };
                let v = (inf - node.cstar).max(0.0);
                if v < best {
                    best = v;
                    best_i = Some(i);
                }
            }
            if let Some(i) = best_i {
                // Refine around the winning node with the exact objective.
                let lo = (etas[i] - eta_step).max(0.5);
                let hi = (etas[i] + eta_step).min(1.0);
                let (_, refined) = crate::numeric::golden_section_min(
                    |eta| delta_bar_unchecked(loss, gamma, eps, eta, alpha_grid),
                    lo,
                    hi,
                    1e-8,
                );
                best = best.min(refined);
            }
            best
        })
        .collect();

    CalibrationCurve::new(epsilon_grid.to_vec(), deltas, CurveKind::RawDelta)
}

/// Lower convex envelope (Fenchel-Legendre biconjugate) of a sampled curve.
///
/// The origin `(0, 0)` is prepended, infinite tail entries are truncated to
/// the last finite epsilon, and the envelope is the lower hull of the
/// remaining points, re-sampled on the input grid.
pub fn biconjugate(curve: &CalibrationCurve) -> Result<CalibrationCurve> {
    let finite: Vec<(f64, f64)> = curve.points().take_while(|&(_, d)| d.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::Domain(
            "biconjugate needs at least 2 finite points including the origin".into(),
        ));
    }
    let mut pts = Vec::with_capacity(finite.len() + 1);
    if finite[0].0 > 0.0 {
        pts.push((0.0, 0.0));
    }
    pts.extend_from_slice(&finite);
    let hull = lower_hull(&pts);
    let out_eps: Vec<f64> = finite.iter().map(|&(e, _)| e).collect();
    let out_deltas: Vec<f64> = out_eps
        .iter()
        .map(|&e| interp_piecewise_linear(&hull, e).max(0.0))
        .collect();
    CalibrationCurve::new(out_eps, out_deltas, CurveKind::Biconjugate)
}

/// Result of [`excess_risk_transform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessTransform {
    /// The target excess-risk bound: the largest feasible epsilon.
    pub epsilon: f64,
    /// False when the bound sits on a zero plateau of the biconjugate (the
    /// generalized inverse is degenerate there, i.e. the surrogate is not
    /// calibrated at this excess level).
    pub invertible: bool,
}

/// Generalized inverse of a biconjugate curve: the largest `eps` on the
/// curve's domain (extended with the origin) whose value is at most
/// `surrogate_excess`.
pub fn excess_risk_transform(
    biconj: &CalibrationCurve,
    surrogate_excess: f64,
) -> Result<ExcessTransform> {
    if biconj.kind() != CurveKind::Biconjugate {
        return Err(Error::Domain(
            "excess_risk_transform requires a biconjugate curve".into(),
        ));
    }
    if !(surrogate_excess >= 0.0) {
        return Err(Error::Domain(format!(
            "surrogate excess must be nonnegative, got {surrogate_excess}"
        )));
    }
    // Conceptual curve: (0, 0) followed by the sampled points, linearly
    // interpolated; the biconjugate is convex and nondecreasing on this set.
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(biconj.len() + 1);
    if biconj.epsilons()[0] > 0.0 {
        pts.push((0.0, 0.0));
    }
    pts.extend(biconj.points());

    let mut epsilon = 0.0;
    let mut value_at = 0.0;
    for w in pts.windows(2) {
        let (e0, d0) = w[0];
        let (e1, d1) = w[1];
        if d1 <= surrogate_excess {
            epsilon = e1;
            value_at = d1;
        } else if d0 <= surrogate_excess {
            // Crossing inside this segment.
            epsilon = e0 + (surrogate_excess - d0) / (d1 - d0) * (e1 - e0);
            value_at = surrogate_excess;
            break;
        } else {
            break;
        }
    }
    if pts[0].1 > surrogate_excess {
        // Even the first point exceeds the excess; only the origin qualifies.
        epsilon = 0.0;
        value_at = 0.0;
    }
    let on_zero_plateau = epsilon > 0.0 && value_at <= 1e-9;
    Ok(ExcessTransform {
        epsilon,
        invertible: !on_zero_plateau,
    })
}

/// Which decision path produced a [`Verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictRule {
    /// Convex surrogates are never calibrated for this target.
    ConvexSurrogate,
    /// Bounded, nonincreasing, quasiconcave-even surrogates with
    /// `phi(-1) > phi(1)`: calibrated iff `phi(gamma) + phi(-gamma) > B`.
    EndpointCondition,
    /// Fallback: strict positivity of the sampled numeric delta curve.
    NumericDelta,
}

impl fmt::Display for VerdictRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictRule::ConvexSurrogate => "convex_surrogate",
            VerdictRule::EndpointCondition => "endpoint_condition",
            VerdictRule::NumericDelta => "numeric_delta",
        })
    }
}

/// Calibration decision for a surrogate against the robust target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub calibrated: bool,
    pub rule: VerdictRule,
    /// For the analytic rules: `phi(gamma) + phi(-gamma) - B`. For the
    /// numeric rule: the minimum sampled delta when calibrated, otherwise the
    /// smallest epsilon at which delta fails strict positivity.
    pub witness: f64,
    /// Whether the surrogate is additionally calibrated for the plain 0-1
    /// target; only decided on the endpoint-condition path.
    pub zero_one_calibrated: Option<bool>,
}

/// Decide calibration of `loss` against the budget-`gamma` robust target.
///
/// Decision order: convex surrogates are not calibrated; bounded,
/// nonincreasing, quasiconcave-even surrogates with a strict endpoint gap are
/// calibrated iff `phi(gamma) + phi(-gamma) > phi(1) + phi(-1)` (and are then
/// also calibrated for the plain 0-1 target); anything else is decided by
/// strict positivity of the numeric delta curve on the default grid.
pub fn verdict(loss: &LossSpec, gamma: f64, report: &StructuralReport) -> Result<Verdict> {
    validate_gamma(gamma)?;
    if report.family != loss.family || report.shift != loss.shift {
        return Err(Error::Domain(format!(
            "structural report for {}(shift {}) does not match loss {}(shift {})",
            report.family, report.shift, loss.family, loss.shift
        )));
    }
    if report.endpoint_sum != loss.endpoint_sum() {
        return Err(Error::Domain(
            "structural report endpoint sum is inconsistent".into(),
        ));
    }

    let witness_gap =
        loss.eval_unchecked(gamma) + loss.eval_unchecked(-gamma) - report.endpoint_sum;

    if report.convex {
        return Ok(Verdict {
            calibrated: false,
            rule: VerdictRule::ConvexSurrogate,
            witness: witness_gap,
            zero_one_calibrated: None,
        });
    }
    if report.bounded
        && report.nonincreasing
        && report.quasiconcave_even
        && report.strict_at_endpoints
    {
        return Ok(Verdict {
            calibrated: witness_gap > 0.0,
            rule: VerdictRule::EndpointCondition,
            witness: witness_gap,
            zero_one_calibrated: Some(true),
        });
    }

    let curve = calibration_fn_numeric(
        loss,
        gamma,
        &default_epsilon_grid(),
        DEFAULT_ETA_POINTS,
        DEFAULT_ALPHA_GRID,
    )?;
    let mut min_delta = f64::INFINITY;
    let mut first_zero = None;
    for (e, d) in curve.points() {
        min_delta = min_delta.min(d);
        if d <= POSITIVITY_THRESHOLD && first_zero.is_none() {
            first_zero = Some(e);
        }
    }
    Ok(match first_zero {
        None => Verdict {
            calibrated: true,
            rule: VerdictRule::NumericDelta,
            witness: min_delta,
            zero_one_calibrated: None,
        },
        Some(e) => Verdict {
            calibrated: false,
            rule: VerdictRule::NumericDelta,
            witness: e,
            zero_one_calibrated: None,
        },
    })
}
