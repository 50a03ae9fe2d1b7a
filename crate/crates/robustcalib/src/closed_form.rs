//! Analytic calibration functions and their convex envelopes, per loss
//! family and parameter regime. These serve as closed-form oracles for the
//! numeric engine (and vice versa).
//!
//! For every bounded, nonincreasing, quasiconcave-even surrogate the
//! calibration function has a single exact closed form. Writing
//! `p(x) = phi_beta(x)` and
//!
//! - `W  = p(gamma) + p(-gamma) - p(1) - p(-1)`  (the calibration witness),
//! - `A0 = p(gamma) - p(-gamma) - p(1) + p(-1)`,
//! - `D  = p(-1) - p(1)`,
//!
//! the excess class-conditional risk of the band endpoint `gamma` over the
//! optimum is the affine function `a(eta) = W/2 + (eta - 1/2) A0`, and that
//! of the wrong-sign endpoint `-1` is `b(eta) = (2 eta - 1) D`; both are
//! nondecreasing (the loss is nonincreasing), and the endpoint-minimum rule
//! reduces every inner infimum to them. Minimizing over the feasible eta
//! ranges of the two constraint-set cases yields
//!
//! `delta(eps)  = min{ W/2 + A0 * max(0, eps - 1/2),  D * eps }`,
//!
//! whose lower convex envelope (using `W <= D` and `W <= A0`, both immediate
//! from monotonicity) is the chord through the origin up to `eps = 1/2`:
//!
//! `delta**(eps) = W * eps` for `eps <= 1/2`, `W/2 + A0 (eps - 1/2)` after.
//!
//! The convex families (hinge, squared) have their own dedicated forms and
//! are their own envelopes; the modified squared loss with a negative shift
//! has a separate piecewise form on the window where it stays calibrated.

use crate::error::{Error, Result};
use crate::loss::{Family, LossSpec};

/// Identifies which analytic regime and branch produced a value.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeTag {
    pub family: Family,
    /// Regime name within the family's parameter partition.
    pub regime: &'static str,
    /// Named constants of the regime's formulas.
    pub constants: Vec<(&'static str, f64)>,
}

fn validate(gamma: f64, epsilon: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok(())
}

fn unsupported(family: Family, beta: f64, gamma: f64, rule: &str) -> Error {
    Error::UnsupportedRegime {
        family: family.to_string(),
        beta,
        gamma,
        rule: rule.to_string(),
    }
}

/// The four endpoint evaluations and derived constants for a
/// quasiconcave-even regime.
struct QceConstants {
    w: f64,
    a0: f64,
    d: f64,
}

fn qce_constants(family: Family, beta: f64, gamma: f64) -> QceConstants {
    let loss = LossSpec {
        family,
        shift: beta,
    };
    let pg = loss.eval_unchecked(gamma);
    let pmg = loss.eval_unchecked(-gamma);
    let p1 = loss.eval_unchecked(1.0);
    let pm1 = loss.eval_unchecked(-1.0);
    QceConstants {
        w: pg + pmg - p1 - pm1,
        a0: pg - pmg - p1 + pm1,
        d: pm1 - p1,
    }
}

fn qce_delta(c: &QceConstants, epsilon: f64) -> f64 {
    let band = 0.5 * c.w + c.a0 * (epsilon - 0.5).max(0.0);
    band.min(c.d * epsilon).max(0.0)
}

fn qce_biconjugate(c: &QceConstants, epsilon: f64) -> f64 {
    if epsilon <= 0.5 {
        (c.w * epsilon).max(0.0)
    } else {
        (0.5 * c.w + c.a0 * (epsilon - 0.5)).max(0.0)
    }
}

fn qce_tag(family: Family, regime: &'static str, c: &QceConstants) -> RegimeTag {
    let mut constants = vec![("W", c.w), ("A0", c.a0), ("A1", 0.5 * c.w), ("D", c.d)];
    if c.d > 0.0 {
        // The knee where the rising branch D*eps meets the plateau W/2.
        constants.push(("eps_knee", 0.5 * c.w / c.d));
    }
    RegimeTag {
        family,
        regime,
        constants,
    }
}

fn ramp_regime(beta: f64, gamma: f64) -> Result<&'static str> {
    if beta < 0.0 {
        return Err(unsupported(
            Family::Ramp,
            beta,
            gamma,
            "ramp requires shift >= 0",
        ));
    }
    Ok(if beta < 1.0 - gamma {
        "0 <= shift < 1 - gamma"
    } else if beta < 1.0 + gamma {
        "1 - gamma <= shift < 1 + gamma"
    } else if beta < 2.0 {
        "1 + gamma <= shift < 2"
    } else {
        "shift >= 2"
    })
}

fn modified_squared_regime(beta: f64, gamma: f64) -> Result<&'static str> {
    const NEG_WINDOW_LO: f64 = -1.0 + std::f64::consts::FRAC_1_SQRT_2;
    if beta >= 0.0 {
        Ok(if beta < gamma {
            "0 <= shift < gamma"
        } else if beta < 1.0 {
            "gamma <= shift < 1"
        } else {
            "shift >= 1"
        })
    } else if gamma < 0.25 && beta > NEG_WINDOW_LO && beta <= -gamma {
        Ok("negative shift window")
    } else {
        Err(unsupported(
            Family::ModifiedSquared,
            beta,
            gamma,
            "negative shifts are supported only for gamma < 1/4 and \
             -1 + 1/sqrt(2) < shift <= -gamma",
        ))
    }
}

/// Analytic calibration function value at `epsilon`, with the regime that
/// produced it.
pub fn delta_closed(
    family: Family,
    beta: f64,
    gamma: f64,
    epsilon: f64,
) -> Result<(f64, RegimeTag)> {
    validate(gamma, epsilon)?;
    match family {
        Family::Ramp => {
            let regime = ramp_regime(beta, gamma)?;
            let c = qce_constants(family, beta, gamma);
            Ok((qce_delta(&c, epsilon), qce_tag(family, regime, &c)))
        }
        Family::Sigmoid => {
            if beta < 0.0 {
                return Err(unsupported(
                    family,
                    beta,
                    gamma,
                    "sigmoid requires shift >= 0",
                ));
            }
            let regime = if beta == 0.0 {
                "shift = 0"
            } else {
                "shift > 0"
            };
            let c = qce_constants(family, beta, gamma);
            let mut tag = qce_tag(family, regime, &c);
            if c.a0 > 0.0 {
                // eta0 solves a(eta0) = 0: the break of the eps > 1/2 branch
                // A0 (eps - eta0).
                let loss = LossSpec {
                    family,
                    shift: beta,
                };
                let eta0 = (loss.eval_unchecked(-1.0) - loss.eval_unchecked(-gamma)) / c.a0;
                tag.constants.push(("eta0", eta0));
            }
            Ok((qce_delta(&c, epsilon), tag))
        }
        Family::ModifiedSquared => {
            let regime = modified_squared_regime(beta, gamma)?;
            if beta >= 0.0 {
                let c = qce_constants(family, beta, gamma);
                let mut tag = qce_tag(family, regime, &c);
                if beta < gamma {
                    // Classic knee constant for this regime:
                    // eps0 = (1-gamma)(1-gamma+2 shift) / (2 (1 - shift^2)).
                    tag.constants.push(("eps0", 0.5 * c.w / c.d));
                }
                Ok((qce_delta(&c, epsilon), tag))
            } else {
                // Negative-shift window: the even part dips at 0, so the band
                // infimum can move to the interior and the piecewise form
                // gains two extra branches.
                // Derivation sketch (b = 1 + shift, so the quadratic piece of
                // the shifted loss is (b - alpha)^2 on [shift, b]):
                // for eta >= 1/2 the conditional-risk minimum over the band
                // [-gamma, gamma] is the interior stationary value
                // 4 b^2 eta (1 - eta) while the stationary point b(2 eta - 1)
                // stays inside the band, i.e. eta <= (b + gamma) / (2 b),
                // and the band-edge value at alpha = gamma after that. Both
                // one-sided infima are nondecreasing in eta, so the outer
                // infimum sits at the smallest feasible eta, giving:
                //   epsilon                       up to eps0 = b^2 - 1/2,
                //   eps0                          up to 1/2,
                //   (1 - eps)(4 b^2 eps - 1)      up to (b + gamma) / (2 b),
                //   (1 - 4 b gamma) eps + (b + gamma)^2 - 1   after.
                let b = 1.0 + beta;
                let eps0 = b * b - 0.5;
                let eta1 = (b + gamma) / (2.0 * b);
                let value = if epsilon <= eps0 {
                    epsilon
                } else if epsilon <= 0.5 {
                    eps0
                } else if epsilon <= eta1 {
                    (1.0 - epsilon) * (4.0 * b * b * epsilon - 1.0)
                } else {
                    (1.0 - 4.0 * gamma * b) * epsilon + (b + gamma) * (b + gamma) - 1.0
                };
                let tag = RegimeTag {
                    family,
                    regime,
                    constants: vec![("eps0", eps0), ("eta1", eta1)],
                };
                Ok((value.max(0.0), tag))
            }
        }
        Family::Hinge => {
            let value = if epsilon <= 0.5 {
                0.0
            } else {
                (1.0 - gamma) * (2.0 * epsilon - 1.0)
            };
            let tag = RegimeTag {
                family,
                regime: "all shifts",
                constants: vec![("slope", 2.0 * (1.0 - gamma))],
            };
            Ok((value, tag))
        }
        Family::Logistic => Err(unsupported(
            family,
            beta,
            gamma,
            "no analytic calibration function; use the numeric engine",
        )),
        Family::Squared => {
            if beta <= -1.0 {
                return Err(unsupported(
                    family,
                    beta,
                    gamma,
                    "squared requires shift > -1",
                ));
            }
            let b1 = 1.0 + beta;
            let eta0 = (1.0 + gamma + beta) / (2.0 * b1);
            let eta1 = (3.0 + gamma + 2.0 * beta) / (4.0 * b1);
            let eta2 = (2.0 + beta) / (2.0 * b1);
            let value = if epsilon < eta0 {
                0.0
            } else if epsilon < eta2 {
                4.0 * b1 * b1 * (epsilon - eta0) * (epsilon - eta0)
            } else {
                4.0 * (1.0 - gamma) * b1 * (epsilon - eta1)
            };
            let tag = RegimeTag {
                family,
                regime: "shift > -1",
                constants: vec![("eta0", eta0), ("eta1", eta1), ("eta2", eta2)],
            };
            Ok((value.max(0.0), tag))
        }
    }
}

/// Analytic lower convex envelope of the calibration function at `epsilon`.
///
/// Defined for the quasiconcave-even regimes (chord-then-affine form above)
/// and for the convex-valued hinge and squared forms (their own envelopes).
/// The negative-shift modified squared window and the logistic loss have no
/// analytic envelope; the numeric biconjugate covers them.
pub fn biconjugate_closed(family: Family, beta: f64, gamma: f64, epsilon: f64) -> Result<f64> {
    validate(gamma, epsilon)?;
    match family {
        Family::Ramp => {
            ramp_regime(beta, gamma)?;
            Ok(qce_biconjugate(
                &qce_constants(family, beta, gamma),
                epsilon,
            ))
        }
        Family::Sigmoid => {
            if beta < 0.0 {
                return Err(unsupported(
                    family,
                    beta,
                    gamma,
                    "sigmoid requires shift >= 0",
                ));
            }
            Ok(qce_biconjugate(
                &qce_constants(family, beta, gamma),
                epsilon,
            ))
        }
        Family::ModifiedSquared => match modified_squared_regime(beta, gamma)? {
            "negative shift window" => Err(unsupported(
                family,
                beta,
                gamma,
                "no analytic envelope for negative shifts; use the numeric biconjugate",
            )),
            _ => Ok(qce_biconjugate(
                &qce_constants(family, beta, gamma),
                epsilon,
            )),
        },
        // The hinge and squared calibration functions are convex (piecewise
        // linear, resp. continuously differentiable quadratic-into-linear),
        // hence equal to their own envelopes.
        Family::Hinge | Family::Squared => Ok(delta_closed(family, beta, gamma, epsilon)?.0),
        Family::Logistic => Err(unsupported(
            family,
            beta,
            gamma,
            "no analytic calibration function; use the numeric engine",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(family: Family, beta: f64, gamma: f64, eps: f64) -> f64 {
        delta_closed(family, beta, gamma, eps).unwrap().0
    }

    fn b(family: Family, beta: f64, gamma: f64, eps: f64) -> f64 {
        biconjugate_closed(family, beta, gamma, eps).unwrap()
    }

    #[test]
    fn ramp_low_shift_regime_values() {
        // shift 0.5, gamma 0.1: rising branch slope 1 - shift/2 = 0.75 up to
        // the knee shift / (2 (2 - shift)) = 1/6, plateau shift/4 = 0.125 to
        // 1/2, then slope 1 - gamma - shift/2 = 0.65.
        assert_abs_diff_eq!(d(Family::Ramp, 0.5, 0.1, 0.1), 0.075, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Ramp, 0.5, 0.1, 0.25), 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Ramp, 0.5, 0.1, 0.45), 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Ramp, 0.5, 0.1, 0.8), 0.32, epsilon = 1e-12);
        // Envelope: chord (shift/2) eps, then the same affine tail.
        assert_abs_diff_eq!(b(Family::Ramp, 0.5, 0.1, 0.4), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(b(Family::Ramp, 0.5, 0.1, 0.8), 0.32, epsilon = 1e-12);
        // At shift 0 the function vanishes on (0, 1/2] (witness W = 0) but
        // still rises past 1/2 with slope 1 - gamma.
        assert_abs_diff_eq!(d(Family::Ramp, 0.0, 0.1, 0.3), 0.0);
        assert_abs_diff_eq!(d(Family::Ramp, 0.0, 0.1, 0.9), 0.36, epsilon = 1e-12);
    }

    #[test]
    fn ramp_mid_shift_regime_values() {
        // shift 1.0, gamma 0.2: rising slope 0.5 to knee (1-gamma)/(2(2-shift))
        // = 0.4, plateau (1-gamma)/4 = 0.2 to 1/2, then ((1-gamma)/2) eps.
        assert_abs_diff_eq!(d(Family::Ramp, 1.0, 0.2, 0.3), 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Ramp, 1.0, 0.2, 0.45), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Ramp, 1.0, 0.2, 0.8), 0.32, epsilon = 1e-12);
        assert_abs_diff_eq!(b(Family::Ramp, 1.0, 0.2, 0.4), 0.16, epsilon = 1e-12);
    }

    #[test]
    fn ramp_high_shift_regimes() {
        // 1 + gamma <= shift < 2: linear with slope 1 - shift/2 throughout.
        for eps in [0.2, 0.5, 0.9] {
            assert_abs_diff_eq!(d(Family::Ramp, 1.5, 0.3, eps), 0.25 * eps, epsilon = 1e-12);
            assert_abs_diff_eq!(b(Family::Ramp, 1.5, 0.3, eps), 0.25 * eps, epsilon = 1e-12);
        }
        // shift >= 2: identically zero.
        assert_abs_diff_eq!(d(Family::Ramp, 2.5, 0.3, 0.7), 0.0);
        assert_abs_diff_eq!(b(Family::Ramp, 2.5, 0.3, 0.7), 0.0);
        // Negative shifts unsupported.
        assert!(delta_closed(Family::Ramp, -0.1, 0.2, 0.5).is_err());
    }

    #[test]
    fn sigmoid_constants_and_values() {
        let loss = LossSpec {
            family: Family::Sigmoid,
            shift: 1.0,
        };
        let p = |a: f64| loss.eval(a).unwrap();
        let (g, eps) = (0.2, 0.25);
        let a1 = (p(g) + p(-g) - p(1.0) - p(-1.0)) / 2.0;
        let a0 = p(g) - p(-g) - p(1.0) + p(-1.0);
        let dd = p(-1.0) - p(1.0);
        // Below the knee A1/D the value rises as D * eps; past it, A1.
        assert!(a1 / dd < eps);
        assert_abs_diff_eq!(d(Family::Sigmoid, 1.0, g, eps), a1, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Sigmoid, 1.0, g, 0.02), dd * 0.02, epsilon = 1e-12);
        // Past 1/2 the value is A0 (eps - eta0) = A1 + A0 (eps - 1/2).
        assert_abs_diff_eq!(
            d(Family::Sigmoid, 1.0, g, 0.8),
            a1 + a0 * 0.3,
            epsilon = 1e-12
        );
        // Envelope: 2 A1 eps on (0, 1/2].
        assert_abs_diff_eq!(
            b(Family::Sigmoid, 1.0, g, 0.25),
            2.0 * a1 * 0.25,
            epsilon = 1e-12
        );
        // Unshifted sigmoid: identically zero.
        assert_abs_diff_eq!(d(Family::Sigmoid, 0.0, g, 0.3), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn modified_squared_nonnegative_shift_values() {
        // 0 <= shift < gamma: slope (1 - shift^2) to eps0, plateau
        // (1-gamma)(1-gamma+2 shift)/2, then W eps with
        // W = (1-gamma)(1-gamma+2 shift).
        let (beta, gamma) = (0.1, 0.5);
        let w = (1.0 - gamma) * (1.0 - gamma + 2.0 * beta);
        let eps0 = w / (2.0 * (1.0 - beta * beta));
        let (v, tag) = delta_closed(Family::ModifiedSquared, beta, gamma, 0.1).unwrap();
        assert!(0.1 < eps0);
        assert_abs_diff_eq!(v, (1.0 - beta * beta) * 0.1, epsilon = 1e-12);
        assert!(tag
            .constants
            .iter()
            .any(|&(n, v)| n == "eps0" && (v - eps0).abs() < 1e-12));
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, beta, gamma, 0.4),
            w / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, beta, gamma, 0.8),
            w * 0.8,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            b(Family::ModifiedSquared, beta, gamma, 0.3),
            w * 0.3,
            epsilon = 1e-12
        );
        // gamma <= shift < 1: linear with slope 1 - shift^2.
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, 0.5, 0.5, 0.7),
            0.75 * 0.7,
            epsilon = 1e-12
        );
        // shift >= 1: identically zero.
        assert_abs_diff_eq!(d(Family::ModifiedSquared, 1.2, 0.2, 0.6), 0.0);
    }

    #[test]
    fn modified_squared_negative_window_values() {
        // shift -0.2, gamma 0.2: eps0 = 0.8^2 - 0.5 = 0.14,
        // eta1 = (0.8 + 0.2) / 1.6 = 0.625, quadratic branch
        // (1 - eps)(2.56 eps - 1) in between.
        let (beta, gamma) = (-0.2, 0.2);
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, beta, gamma, 0.1),
            0.1,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, beta, gamma, 0.3),
            0.14,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, beta, gamma, 0.55),
            0.45 * (2.56 * 0.55 - 1.0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            d(Family::ModifiedSquared, beta, gamma, 0.8),
            0.288,
            epsilon = 1e-12
        );
        // No analytic envelope in this window.
        assert!(biconjugate_closed(Family::ModifiedSquared, beta, gamma, 0.3).is_err());
        // Outside the window: unsupported.
        assert!(delta_closed(Family::ModifiedSquared, -0.5, 0.2, 0.3).is_err());
        assert!(delta_closed(Family::ModifiedSquared, -0.1, 0.3, 0.3).is_err());
    }

    #[test]
    fn hinge_and_squared_values() {
        assert_abs_diff_eq!(d(Family::Hinge, 0.5, 0.2, 0.3), 0.0);
        assert_abs_diff_eq!(d(Family::Hinge, 0.5, 0.2, 0.8), 0.8 * 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(b(Family::Hinge, 0.5, 0.2, 0.8), 0.8 * 0.6, epsilon = 1e-12);

        // Squared, shift 0, gamma 0.2: eta0 = 0.6, eta1 = 0.8, eta2 = 1.
        assert_abs_diff_eq!(d(Family::Squared, 0.0, 0.2, 0.5), 0.0);
        assert_abs_diff_eq!(d(Family::Squared, 0.0, 0.2, 0.7), 0.04, epsilon = 1e-12);
        assert_abs_diff_eq!(d(Family::Squared, 0.0, 0.2, 1.0), 0.64, epsilon = 1e-12);
        assert!(delta_closed(Family::Squared, -1.0, 0.2, 0.5).is_err());
        assert!(delta_closed(Family::Logistic, 0.0, 0.2, 0.5).is_err());
    }

    #[test]
    fn envelope_below_delta_everywhere_defined() {
        let cases = [
            (Family::Ramp, 0.2, 0.1),
            (Family::Ramp, 0.5, 0.1),
            (Family::Ramp, 1.0, 0.2),
            (Family::Ramp, 1.5, 0.3),
            (Family::Ramp, 2.5, 0.3),
            (Family::Sigmoid, 0.5, 0.2),
            (Family::Sigmoid, 2.0, 0.2),
            (Family::ModifiedSquared, 0.0, 0.5),
            (Family::ModifiedSquared, 0.1, 0.5),
            (Family::ModifiedSquared, 0.5, 0.5),
            (Family::Hinge, 0.4, 0.2),
            (Family::Squared, 0.0, 0.2),
            (Family::Squared, 0.5, 0.2),
        ];
        for (f, beta, gamma) in cases {
            for i in 1..=100 {
                let eps = i as f64 / 100.0;
                let dv = d(f, beta, gamma, eps);
                let bv = b(f, beta, gamma, eps);
                assert!(bv <= dv + 1e-12, "{f} beta {beta} at {eps}: {bv} > {dv}");
            }
        }
    }

    #[test]
    fn regime_continuity_in_shift() {
        // No jump across regime boundaries: values at beta +/- 1e-6 around
        // each boundary differ only by the formulas' O(1e-6) smooth drift.
        let boundaries = [
            (Family::Ramp, 1.0 - 0.2, 0.2),
            (Family::Ramp, 1.0 + 0.2, 0.2),
            (Family::Ramp, 2.0, 0.2),
            (Family::ModifiedSquared, 0.5, 0.5),
            (Family::ModifiedSquared, 1.0, 0.2),
        ];
        for (f, boundary, gamma) in boundaries {
            for i in 1..=20 {
                let eps = i as f64 / 20.0;
                let lo = d(f, boundary - 1e-6, gamma, eps);
                let hi = d(f, boundary + 1e-6, gamma, eps);
                assert!(
                    (hi - lo).abs() < 1e-5,
                    "{f} at boundary {boundary}, eps {eps}"
                );
                let lo = b(f, boundary - 1e-6, gamma, eps);
                let hi = b(f, boundary + 1e-6, gamma, eps);
                assert!(
                    (hi - lo).abs() < 1e-5,
                    "{f} envelope at {boundary}, eps {eps}"
                );
            }
        }
    }

    #[test]
    fn positivity_matches_calibrated_parameter_sets() {
        let check = |f: Family, beta: f64, gamma: f64, expect_positive: bool| {
            let all_positive = (1..=100).all(|i| d(f, beta, gamma, i as f64 / 100.0) > 0.0);
            assert_eq!(
                all_positive, expect_positive,
                "{f} beta {beta} gamma {gamma}"
            );
        };
        check(Family::Ramp, 0.0, 0.2, false);
        check(Family::Ramp, 0.5, 0.2, true);
        check(Family::Ramp, 1.9, 0.2, true);
        check(Family::Ramp, 2.0, 0.2, false);
        check(Family::Sigmoid, 0.0, 0.2, false);
        check(Family::Sigmoid, 0.5, 0.2, true);
        check(Family::ModifiedSquared, 0.0, 0.2, true);
        check(Family::ModifiedSquared, 0.9, 0.2, true);
        check(Family::ModifiedSquared, 1.0, 0.2, false);
        check(Family::ModifiedSquared, -0.2, 0.2, true);
        check(Family::Hinge, 0.4, 0.2, false);
        check(Family::Squared, 0.5, 0.2, false);
    }

    #[test]
    fn closed_matches_numeric_spot_checks() {
        use crate::calibration::calibration_fn_numeric;
        let cases = [
            (Family::Ramp, 0.5, 0.1),
            (Family::Ramp, 1.0, 0.2),
            (Family::Sigmoid, 1.0, 0.2),
            (Family::ModifiedSquared, 0.1, 0.5),
            (Family::ModifiedSquared, -0.2, 0.2),
            (Family::Hinge, 0.4, 0.2),
            (Family::Squared, 0.5, 0.2),
        ];
        let grid = [0.05, 0.2, 0.35, 0.55, 0.75, 0.95];
        for (f, beta, gamma) in cases {
            let loss = LossSpec {
                family: f,
                shift: beta,
            };
            let curve = calibration_fn_numeric(&loss, gamma, &grid, 2001, 2001).unwrap();
            for (eps, numeric) in curve.points() {
                let closed = d(f, beta, gamma, eps);
                assert!(
                    (numeric - closed).abs() <= 2e-2,
                    "{f} beta {beta} gamma {gamma} eps {eps}: numeric {numeric} vs closed {closed}"
                );
            }
        }
    }
}
