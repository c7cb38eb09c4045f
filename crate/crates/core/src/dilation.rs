//! Time-dilation machinery: coefficient functions g, h and their accumulated
//! integrals G(s,t). Power-law and constant kinds integrate in closed form;
//! tabulated kinds integrate the linear interpolant exactly.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A non-negative coefficient function of time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientFn {
    /// `prefactor * t^exponent`
    PowerLaw { prefactor: f64, exponent: f64 },
    /// Constant value.
    Constant { value: f64 },
    /// Piecewise-linear interpolant through sorted `(t, value)` knots.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl CoefficientFn {
    pub fn power_law(prefactor: f64, exponent: f64) -> Self {
        CoefficientFn::PowerLaw { prefactor, exponent }
    }

    pub fn constant(value: f64) -> Self {
        CoefficientFn::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientFn::PowerLaw { prefactor, .. } => {
                if *prefactor < 0.0 || !prefactor.is_finite() {
                    return Err(Error::Validation(format!(
                        "power-law prefactor must be finite and >= 0, got {prefactor}"
                    )));
                }
            }
            CoefficientFn::Constant { value } => {
                if *value < 0.0 || !value.is_finite() {
                    return Err(Error::Validation(format!(
                        "constant coefficient must be finite and >= 0, got {value}"
                    )));
                }
            }
            CoefficientFn::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Validation(
                        "tabulated coefficient needs at least 2 knots".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::Validation(
                            "tabulated knots must be strictly increasing in t".into(),
                        ));
                    }
                }
                if knots.iter().any(|&(t, v)| t < 0.0 || v < 0.0 || !v.is_finite()) {
                    return Err(Error::Validation(
                        "tabulated knots must have t >= 0 and finite value >= 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Pointwise evaluation for t > 0. Tabulated kinds clamp to the knot span.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CoefficientFn::PowerLaw { prefactor, exponent } => prefactor * t.powf(*exponent),
            CoefficientFn::Constant { value } => *value,
            CoefficientFn::Tabulated { knots } => {
                let first = knots.first().unwrap();
                let last = knots.last().unwrap();
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let idx = knots.partition_point(|&(tk, _)| tk <= t);
                let (t0, v0) = knots[idx - 1];
                let (t1, v1) = knots[idx];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// True when both shape parameters admit closed-form integrals.
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, CoefficientFn::Tabulated { .. })
    }
}

/// Verdict on the divergence hypothesis `G(t) -> infinity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DivergenceVerdict {
    /// Exact: the accumulated dilation diverges.
    Diverges { method: VerdictMethod },
    /// No divergence observed up to the horizon. For tabulated coefficients
    /// this is a heuristic; `limit_estimate` extrapolates the window sums
    /// when they decay geometrically.
    BoundedOnHorizon {
        method: VerdictMethod,
        limit_estimate: Option<f64>,
    },
    /// Exact: the improper integral converges to `limit`.
    ExactlyKnown { limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    Exact,
    Heuristic,
}

/// Accumulated dilation G(s,t) = int_s^t g(r) dr for one coefficient function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dilation {
    coefficient: CoefficientFn,
    /// Antiderivative values at the knots, cached for the tabulated kind.
    #[serde(skip)]
    antiderivative: Vec<f64>,
}

impl Dilation {
    pub fn new(coefficient: CoefficientFn) -> Result<Self> {
        coefficient.validate()?;
        let antiderivative = match &coefficient {
            CoefficientFn::Tabulated { knots } => {
                let mut acc = Vec::with_capacity(knots.len());
                let mut total = 0.0;
                acc.push(0.0);
                for w in knots.windows(2) {
                    total += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
                    acc.push(total);
                }
                acc
            }
            _ => Vec::new(),
        };
        Ok(Dilation {
            coefficient,
            antiderivative,
        })
    }

    pub fn coefficient(&self) -> &CoefficientFn {
        &self.coefficient
    }

    /// G(s, t). Closed form for power-law/constant kinds, exact on the linear
    /// interpolant for tabulated kinds.
    pub fn integrate(&self, s: f64, t: f64) -> Result<f64> {
        if !(0.0 <= s && s <= t) {
            return Err(Error::Domain(format!(
                "integration bounds must satisfy 0 <= s <= t, got s={s}, t={t}"
            )));
        }
        match &self.coefficient {
            CoefficientFn::Constant { value } => Ok(value * (t - s)),
            CoefficientFn::PowerLaw { prefactor, exponent } => {
                if *exponent <= -1.0 && s == 0.0 && *prefactor > 0.0 {
                    return Err(Error::Domain(format!(
                        "power-law exponent {exponent} is non-integrable at 0"
                    )));
                }
                let p = exponent + 1.0;
                let anti = |u: f64| if u == 0.0 { 0.0 } else { prefactor * u.powf(p) / p };
                Ok(anti(t) - anti(s))
            }
            CoefficientFn::Tabulated { knots } => {
                Ok(self.tabulated_antiderivative(knots, t) - self.tabulated_antiderivative(knots, s))
            }
        }
    }

    /// G(t) = G(0, t).
    pub fn accumulated(&self, t: f64) -> Result<f64> {
        self.integrate(0.0, t)
    }

    fn tabulated_antiderivative(&self, knots: &[(f64, f64)], u: f64) -> f64 {
        let first = knots.first().unwrap();
        let last = knots.last().unwrap();
        if u <= first.0 {
            // constant extrapolation below the first knot
            return first.1 * (u - first.0);
        }
        if u >= last.0 {
            return *self.antiderivative.last().unwrap() + last.1 * (u - last.0);
        }
        let idx = knots.partition_point(|&(tk, _)| tk <= u);
        let (t0, v0) = knots[idx - 1];
        let (t1, v1) = knots[idx];
        let frac = (u - t0) / (t1 - t0);
        let vmid = v0 + (v1 - v0) * frac;
        self.antiderivative[idx - 1] + 0.5 * (v0 + vmid) * (u - t0)
    }

    /// Decide the divergence hypothesis on G. Exact for power-law and constant
    /// kinds; heuristic (dyadic growth windows) for tabulated kinds.
    pub fn check_condition_divergence(&self, horizon: f64) -> DivergenceVerdict {
        match &self.coefficient {
            CoefficientFn::Constant { value } => {
                if *value > 0.0 {
                    DivergenceVerdict::Diverges {
                        method: VerdictMethod::Exact,
                    }
                } else {
                    DivergenceVerdict::ExactlyKnown { limit: 0.0 }
                }
            }
            CoefficientFn::PowerLaw { prefactor, exponent } => {
                if *prefactor == 0.0 {
                    DivergenceVerdict::ExactlyKnown { limit: 0.0 }
                } else if *exponent >= -1.0 {
                    DivergenceVerdict::Diverges {
                        method: VerdictMethod::Exact,
                    }
                } else {
                    // Integrable tail but non-integrable at 0; the limit of
                    // G(1, t) exists and is reported relative to s = 1.
                    let p = exponent + 1.0;
                    DivergenceVerdict::ExactlyKnown {
                        limit: -prefactor / p,
                    }
                }
            }
            CoefficientFn::Tabulated { .. } => self.tabulated_divergence_heuristic(horizon),
        }
    }

    fn tabulated_divergence_heuristic(&self, horizon: f64) -> DivergenceVerdict {
        // Dyadic windows [2^k, 2^{k+1}] up to the horizon (capped at the knot span).
        let span_end = match &self.coefficient {
            CoefficientFn::Tabulated { knots } => knots.last().unwrap().0,
            _ => unreachable!(),
        };
        let top = horizon.min(span_end);
        let mut windows = Vec::new();
        let mut lo = 1.0_f64.min(top / 2.0).max(1e-6);
        while 2.0 * lo <= top {
            let hi = 2.0 * lo;
            let w = self.integrate(lo, hi).unwrap_or(0.0);
            windows.push(w);
            lo = hi;
        }
        if windows.len() < 3 {
            return DivergenceVerdict::BoundedOnHorizon {
                method: VerdictMethod::Heuristic,
                limit_estimate: None,
            };
        }
        let tail = &windows[windows.len().saturating_sub(4)..];
        let floor = 1e-12 * windows.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let non_decreasing = tail.windows(2).all(|w| w[1] >= 0.98 * w[0]) && tail[0] > floor;
        if non_decreasing {
            DivergenceVerdict::Diverges {
                method: VerdictMethod::Heuristic,
            }
        } else {
            // Geometric extrapolation of the remaining mass when the window
            // sums decay with a stable ratio.
            let mut limit_estimate = None;
            let n = windows.len();
            if n >= 3 && windows[n - 2] > 0.0 {
                let r = windows[n - 1] / windows[n - 2];
                if r < 0.95 {
                    let partial = self.accumulated(lo).unwrap_or(0.0);
                    limit_estimate = Some(partial + windows[n - 1] * r / (1.0 - r));
                }
            }
            DivergenceVerdict::BoundedOnHorizon {
                method: VerdictMethod::Heuristic,
                limit_estimate,
            }
        }
    }
}
