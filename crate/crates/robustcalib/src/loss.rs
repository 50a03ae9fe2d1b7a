//! Margin-based surrogate losses, the robust target loss, and structural
//! property reports.
//!
//! Every surrogate is a shifted margin loss `phi_beta(alpha) = phi(alpha - beta)`
//! where `phi` is one of six base families. The robust target is the step loss
//! `1{alpha <= gamma}` for a budget `gamma` in (0, 1).

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// The six supported base loss families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `min{1, max{0, (1 - a)/2}}` — bounded, piecewise linear.
    Ramp,
    /// `1 / (1 + e^a)` — bounded, smooth.
    Sigmoid,
    /// `1` for `a <= 0`, `(1 - a)^2` for `0 < a <= 1`, `0` for `a > 1` —
    /// bounded, piecewise quadratic.
    ModifiedSquared,
    /// `max{0, 1 - a}` — convex, unbounded.
    Hinge,
    /// `ln(1 + e^{-a})` — convex, unbounded.
    Logistic,
    /// `(1 - a)^2` — convex, unbounded, not monotone.
    Squared,
}

impl Family {
    /// All families, in a stable order.
    pub const ALL: [Family; 6] = [
        Family::Ramp,
        Family::Sigmoid,
        Family::ModifiedSquared,
        Family::Hinge,
        Family::Logistic,
        Family::Squared,
    ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Ramp => "ramp",
            Family::Sigmoid => "sigmoid",
            Family::ModifiedSquared => "modified_squared",
            Family::Hinge => "hinge",
            Family::Logistic => "logistic",
            Family::Squared => "squared",
        };
        f.write_str(name)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ramp" => Ok(Family::Ramp),
            "sigmoid" => Ok(Family::Sigmoid),
            "modified_squared" => Ok(Family::ModifiedSquared),
            "hinge" => Ok(Family::Hinge),
            "logistic" => Ok(Family::Logistic),
            "squared" => Ok(Family::Squared),
            other => Err(Error::Domain(format!(
                "unknown loss family '{other}' (expected one of: ramp, sigmoid, \
                 modified_squared, hinge, logistic, squared)"
            ))),
        }
    }
}

/// A shifted surrogate loss `phi_beta(alpha) = phi(alpha - beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    pub family: Family,
    /// Horizontal shift `beta`, in margin units.
    pub shift: f64,
}

impl LossSpec {
    pub fn new(family: Family, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::Domain(format!("shift must be finite, got {shift}")));
        }
        Ok(LossSpec { family, shift })
    }

    /// Evaluate the shifted loss at margin `alpha`.
    pub fn eval(&self, alpha: f64) -> Result<f64> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("margin must be finite, got {alpha}")));
        }
        Ok(self.eval_unchecked(alpha))
    }

    /// `eval` without the finiteness check; used by tight inner loops that
    /// validate their inputs up front.
    #[inline]
    pub(crate) fn eval_unchecked(&self, alpha: f64) -> f64 {
        let a = alpha - self.shift;
        match self.family {
            Family::Ramp => ((1.0 - a) / 2.0).clamp(0.0, 1.0),
            Family::Sigmoid => sigmoid(-a),
            Family::ModifiedSquared => {
                if a <= 0.0 {
                    1.0
                } else if a <= 1.0 {
                    (1.0 - a) * (1.0 - a)
                } else {
                    0.0
                }
            }
            Family::Hinge => (1.0 - a).max(0.0),
            Family::Logistic => {
                // ln(1 + e^{-a}), computed without overflow on either tail.
                if a >= 0.0 {
                    (-a).exp().ln_1p()
                } else {
                    -a + a.exp().ln_1p()
                }
            }
            Family::Squared => (1.0 - a) * (1.0 - a),
        }
    }

    /// The even part `phi_beta(alpha) + phi_beta(-alpha)`.
    ///
    /// Evaluated in a fixed order so that `even_part(alpha)` and
    /// `even_part(-alpha)` are bitwise identical.
    pub fn even_part(&self, alpha: f64) -> Result<f64> {
        let m = alpha.abs();
        Ok(self.eval(m)? + self.eval(-m)?)
    }

    /// Left and right derivatives at `alpha` of the piecewise closed form.
    ///
    /// The two coincide wherever the family is differentiable; at kinks both
    /// one-sided limits of the derivative are reported.
    pub fn one_sided_derivatives(&self, alpha: f64) -> Result<(f64, f64)> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("margin must be finite, got {alpha}")));
        }
        let a = alpha - self.shift;
        Ok(match self.family {
            Family::Ramp => {
                // slope -1/2 on (-1, 1), flat outside; kinks at a = +/-1.
                let slope = |x: f64| if (-1.0..1.0).contains(&x) { -0.5 } else { 0.0 };
                if a == -1.0 {
                    (0.0, -0.5)
                } else if a == 1.0 {
                    (-0.5, 0.0)
                } else {
                    (slope(a), slope(a))
                }
            }
            Family::Sigmoid => {
                let v = sigmoid(-a);
                let d = -v * (1.0 - v);
                (d, d)
            }
            Family::ModifiedSquared => {
                if a == 0.0 {
                    (0.0, -2.0)
                } else if !(0.0..1.0).contains(&a) {
                    (0.0, 0.0)
                } else {
                    let d = -2.0 * (1.0 - a);
                    (d, d)
                }
            }
            Family::Hinge => {
                if a == 1.0 {
                    (-1.0, 0.0)
                } else if a < 1.0 {
                    (-1.0, -1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            Family::Logistic => {
                let d = -sigmoid(a);
                (d, d)
            }
            Family::Squared => {
                let d = -2.0 * (1.0 - a);
                (d, d)
            }
        })
    }

    /// `B = phi_beta(1) + phi_beta(-1)`.
    pub fn endpoint_sum(&self) -> f64 {
        self.eval_unchecked(1.0) + self.eval_unchecked(-1.0)
    }

    /// Whether the loss is bounded above (family metadata).
    pub fn is_bounded(&self) -> bool {
        matches!(
            self.family,
            Family::Ramp | Family::Sigmoid | Family::ModifiedSquared
        )
    }

    /// Whether the loss is convex in the margin (family metadata).
    pub fn is_convex(&self) -> bool {
        matches!(
            self.family,
            Family::Hinge | Family::Logistic | Family::Squared
        )
    }

    /// Whether the loss is nonincreasing in the margin (family metadata).
    /// True for every family except the squared loss, whose parabola rises
    /// again past its vertex.
    pub fn is_nonincreasing(&self) -> bool {
        self.family != Family::Squared
    }

    /// Analytic prediction for the quasiconcave-even property: the bounded
    /// families with a nonnegative shift. `structural_report` cross-checks
    /// this against a sampled superlevel-set test.
    pub fn quasiconcave_even_hint(&self) -> bool {
        self.is_bounded() && self.shift >= 0.0
    }

    /// Produce a [`StructuralReport`] with default grid settings
    /// (radius `4 + |shift|`, 4001 points).
    pub fn structural_report_default(&self) -> Result<StructuralReport> {
        self.structural_report(4.0 + self.shift.abs(), 4001)
    }

    /// Structural property flags, set from family knowledge and cross-checked
    /// numerically on a symmetric grid of `grid_points` margins spanning
    /// `[-grid_radius, grid_radius]`.
    ///
    /// Preconditions: `grid_radius >= 2 + |shift|` (covers every kink of
    /// every family) and `grid_points >= 1001`, odd (so 0 is a grid node).
    pub fn structural_report(
        &self,
        grid_radius: f64,
        grid_points: usize,
    ) -> Result<StructuralReport> {
        if !(grid_radius >= 2.0 + self.shift.abs()) {
            return Err(Error::Precondition(format!(
                "grid_radius {grid_radius} must be at least 2 + |shift| = {}",
                2.0 + self.shift.abs()
            )));
        }
        if grid_points < 1001 || grid_points.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "grid_points must be odd and >= 1001, got {grid_points}"
            )));
        }

        let n = grid_points;
        let step = 2.0 * grid_radius / (n - 1) as f64;
        let alphas: Vec<f64> = (0..n).map(|i| -grid_radius + step * i as f64).collect();
        let values: Vec<f64> = alphas.iter().map(|&a| self.eval_unchecked(a)).collect();

        // Monotonicity cross-check: adjacent differences on the grid.
        let numeric_nonincreasing = values.windows(2).all(|w| w[0] >= w[1] - 1e-12);
        if numeric_nonincreasing != self.is_nonincreasing() {
            return Err(Error::Internal(format!(
                "monotonicity metadata for {} disagrees with the grid check",
                self.family
            )));
        }

        // Convexity cross-check: midpoint convexity on random triples for
        // convex families; existence of a concavity witness otherwise.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1ab1e);
        if self.is_convex() {
            for _ in 0..1000 {
                let x = rng.gen_range(-grid_radius..grid_radius);
                let y = rng.gen_range(-grid_radius..grid_radius);
                let mid = 0.5 * (x + y);
                let lhs = self.eval_unchecked(mid);
                let rhs = 0.5 * (self.eval_unchecked(x) + self.eval_unchecked(y));
                if lhs > rhs + 1e-9 {
                    return Err(Error::Internal(format!(
                        "convexity metadata for {} disagrees with midpoint check at ({x}, {y})",
                        self.family
                    )));
                }
            }
        } else {
            let has_concave_kink = values.windows(3).any(|w| w[1] > 0.5 * (w[0] + w[2]) + 1e-9);
            if !has_concave_kink {
                return Err(Error::Internal(format!(
                    "non-convexity metadata for {} found no concavity witness on the grid",
                    self.family
                )));
            }
        }

        // Quasiconcave-even: every superlevel set of the sampled even part
        // must be a contiguous index interval. Equivalent formulation: no
        // interior "valley", i.e. no index strictly below (tolerance 1e-9)
        // both some value to its left and some value to its right.
        let even: Vec<f64> = alphas
            .iter()
            .map(|&a| {
                let m = a.abs();
                self.eval_unchecked(m) + self.eval_unchecked(-m)
            })
            .collect();
        let quasiconcave_even = is_quasiconcave_sampled(&even, 1e-9);

        let b = self.endpoint_sum();
        Ok(StructuralReport {
            family: self.family,
            shift: self.shift,
            bounded: self.is_bounded(),
            nonincreasing: self.is_nonincreasing(),
            quasiconcave_even,
            convex: self.is_convex(),
            endpoint_sum: b,
            strict_at_endpoints: self.eval_unchecked(-1.0) > self.eval_unchecked(1.0),
        })
    }
}

/// Numerically stable `1 / (1 + e^{-x})`.
#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Whether a sampled function has only contiguous superlevel sets, up to an
/// absolute tolerance: true iff no sample sits more than `tol` below both the
/// running maximum on its left and the running maximum on its right.
pub(crate) fn is_quasiconcave_sampled(values: &[f64], tol: f64) -> bool {
    let n = values.len();
    if n < 3 {
        return true;
    }
    let mut prefix_max = vec![f64::NEG_INFINITY; n];
    let mut acc = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        prefix_max[i] = acc;
        acc = acc.max(v);
    }
    let mut suffix = f64::NEG_INFINITY;
    for i in (0..n).rev() {
        let bar = prefix_max[i].min(suffix);
        if values[i] < bar - tol {
            return false;
        }
        suffix = suffix.max(values[i]);
    }
    true
}

/// The robust target loss `1{alpha <= gamma}` with budget `gamma` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustTarget {
    gamma: f64,
}

impl RobustTarget {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!(
                "gamma must lie strictly in (0, 1), got {gamma}"
            )));
        }
        Ok(RobustTarget { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The target loss value at margin `alpha`.
    pub fn eval(&self, alpha: f64) -> f64 {
        if alpha <= self.gamma {
            1.0
        } else {
            0.0
        }
    }
}

/// Structural property flags for one [`LossSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralReport {
    pub family: Family,
    pub shift: f64,
    pub bounded: bool,
    pub nonincreasing: bool,
    pub quasiconcave_even: bool,
    pub convex: bool,
    /// `B = phi_beta(1) + phi_beta(-1)`.
    pub endpoint_sum: f64,
    /// `phi_beta(-1) > phi_beta(1)`.
    pub strict_at_endpoints: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn loss(family: Family, shift: f64) -> LossSpec {
        LossSpec::new(family, shift).unwrap()
    }

    #[test]
    fn eval_matches_hand_computed_values() {
        assert_abs_diff_eq!(loss(Family::Ramp, 0.5).eval(1.0).unwrap(), 0.25);
        assert_abs_diff_eq!(loss(Family::Hinge, 0.0).eval(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            loss(Family::ModifiedSquared, 0.2).eval(0.5).unwrap(),
            0.49,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(loss(Family::Sigmoid, 0.0).eval(0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(
            loss(Family::Logistic, 0.0).eval(0.0).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            loss(Family::Squared, 0.2).eval(0.0).unwrap(),
            1.44,
            epsilon = 1e-15
        );
    }

    #[test]
    fn eval_rejects_non_finite_margin() {
        assert!(loss(Family::Ramp, 0.0).eval(f64::NAN).is_err());
        assert!(loss(Family::Ramp, 0.0).eval(f64::INFINITY).is_err());
    }

    #[test]
    fn even_part_values_and_symmetry() {
        let ramp = loss(Family::Ramp, 0.0);
        for a in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_abs_diff_eq!(ramp.even_part(a).unwrap(), 1.0, epsilon = 1e-15);
        }
        let sq = loss(Family::Squared, 0.2);
        assert_abs_diff_eq!(sq.even_part(0.0).unwrap(), 2.88, epsilon = 1e-12);
        let sig = loss(Family::Sigmoid, 0.0);
        assert_abs_diff_eq!(sig.even_part(0.0).unwrap(), 1.0, epsilon = 1e-15);
        // Exact symmetry, bitwise.
        for f in Family::ALL {
            let l = loss(f, 0.3);
            for a in [0.1, 0.77, 2.5] {
                assert_eq!(
                    l.even_part(a).unwrap().to_bits(),
                    l.even_part(-a).unwrap().to_bits()
                );
            }
        }
    }

    #[test]
    fn one_sided_derivatives_at_kinks() {
        assert_eq!(
            loss(Family::Hinge, 0.0).one_sided_derivatives(1.0).unwrap(),
            (-1.0, 0.0)
        );
        let (l, r) = loss(Family::Sigmoid, 0.0)
            .one_sided_derivatives(0.0)
            .unwrap();
        assert_abs_diff_eq!(l, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r, -0.25, epsilon = 1e-15);
        assert_eq!(
            loss(Family::Ramp, 0.0).one_sided_derivatives(5.0).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(
            loss(Family::Ramp, 0.0).one_sided_derivatives(-1.0).unwrap(),
            (0.0, -0.5)
        );
        assert_eq!(
            loss(Family::ModifiedSquared, 0.0)
                .one_sided_derivatives(0.0)
                .unwrap(),
            (0.0, -2.0)
        );
    }

    #[test]
    fn derivatives_nonpositive_except_squared() {
        for f in Family::ALL {
            if f == Family::Squared {
                continue;
            }
            for shift in [-0.3, 0.0, 0.5, 1.5] {
                let l = loss(f, shift);
                for i in 0..200 {
                    let a = -4.0 + 8.0 * i as f64 / 199.0;
                    let (dl, dr) = l.one_sided_derivatives(a).unwrap();
                    assert!(dl <= 0.0 && dr <= 0.0, "{f} shift {shift} at {a}");
                }
            }
        }
    }

    #[test]
    fn structural_report_flags() {
        let r = loss(Family::Ramp, 0.3).structural_report_default().unwrap();
        assert!(r.bounded && r.nonincreasing && r.quasiconcave_even && !r.convex);
        assert!(r.strict_at_endpoints);

        let s = loss(Family::Squared, 0.2)
            .structural_report_default()
            .unwrap();
        assert!(!s.bounded && !s.nonincreasing && !s.quasiconcave_even && s.convex);
        assert_abs_diff_eq!(
            s.endpoint_sum,
            0.2f64.powi(2) + 2.2f64.powi(2),
            epsilon = 1e-12
        );

        let m = loss(Family::ModifiedSquared, -0.2)
            .structural_report_default()
            .unwrap();
        assert!(!m.quasiconcave_even);

        let h = loss(Family::Hinge, 0.5)
            .structural_report_default()
            .unwrap();
        assert!(h.convex && h.nonincreasing && !h.bounded);
    }

    #[test]
    fn quasiconcave_hint_matches_numeric_test() {
        for f in Family::ALL {
            for shift in [-0.5, -0.2, 0.0, 0.3, 1.0, 2.5] {
                let l = loss(f, shift);
                let rep = l.structural_report_default().unwrap();
                // The analytic hint never claims quasiconcavity the numeric
                // test rejects; for bounded families they agree exactly.
                if l.quasiconcave_even_hint() {
                    assert!(rep.quasiconcave_even, "{f} shift {shift}");
                }
                if l.is_bounded() {
                    assert_eq!(
                        rep.quasiconcave_even,
                        l.quasiconcave_even_hint(),
                        "{f} {shift}"
                    );
                }
            }
        }
    }

    #[test]
    fn structural_report_rejects_bad_grids() {
        let l = loss(Family::Ramp, 1.0);
        assert!(l.structural_report(2.0, 4001).is_err()); // radius < 2 + |shift|
        assert!(l.structural_report(4.0, 100).is_err()); // too few points
        assert!(l.structural_report(4.0, 4000).is_err()); // even count
    }

    #[test]
    fn nonincreasing_on_fine_grid() {
        for f in Family::ALL {
            if f == Family::Squared {
                continue;
            }
            for shift in [-0.2, 0.0, 0.7, 2.0] {
                let l = loss(f, shift);
                let mut prev = f64::INFINITY;
                for i in 0..4001 {
                    let a = -5.0 + 10.0 * i as f64 / 4000.0;
                    let v = l.eval(a).unwrap();
                    assert!(v <= prev + 1e-12);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn robust_target_validation_and_eval() {
        assert!(RobustTarget::new(0.0).is_err());
        assert!(RobustTarget::new(1.0).is_err());
        let t = RobustTarget::new(0.1).unwrap();
        assert_eq!(t.eval(0.05), 1.0);
        assert_eq!(t.eval(0.1), 1.0);
        assert_eq!(t.eval(0.11), 0.0);
    }

    #[test]
    fn family_round_trips_through_strings() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
