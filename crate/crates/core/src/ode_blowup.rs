//! The comparison ODE system z_i' = k f_i(t) z_j^{beta_i} with z_i(t0) = k/2,
//! its logarithmic functional Z = log(z_i z_j), the closed-form lower envelope
//! H obtained from the Young-type inequality, and blow-up time estimates.
//!
//! Two constants enter the envelope and are kept separate: the Young growth
//! constant c_y = young_constant(beta) (scaled by k), and the exponent factor
//! kappa = (beta_i beta_j - 1)/(beta_i + beta_j + 2) multiplying Z in the
//! differential inequality Z' >= k c_y F exp(kappa Z).

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use std::sync::Arc;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct OdeSpec {
    pub f: (TimeFn, TimeFn),
    pub beta: (f64, f64),
    pub k: f64,
    pub t0: f64,
    pub horizon: f64,
}

impl OdeSpec {
    pub fn new(f: (TimeFn, TimeFn), beta: (f64, f64), k: f64, t0: f64, horizon: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Validation(format!("k must be positive, got {k}")));
        }
        if !(beta.0 >= 1.0 && beta.1 >= 1.0 && beta.0 * beta.1 > 1.0) {
            return Err(Error::Validation(format!(
                "need beta_i >= 1 and beta_i*beta_j > 1, got {beta:?}"
            )));
        }
        if !(horizon > t0) {
            return Err(Error::Validation("horizon must exceed t0".into()));
        }
        Ok(OdeSpec { f, beta, k, t0, horizon })
    }

    /// F(t) built from the stored f pair via the standard exponent mix.
    pub fn big_f(&self, t: f64) -> f64 {
        let (b1, b2) = self.beta;
        let f1 = (self.f.0)(t);
        let f2 = (self.f.1)(t);
        let outer = (b1 + 1.0) * (b2 + 1.0) / (b1 + b2 + 2.0);
        (f1.powf(1.0 / (b1 + 1.0)) * f2.powf(1.0 / (b2 + 1.0))).powf(outer)
    }

    /// kappa = (beta_i beta_j - 1)/(beta_i + beta_j + 2)
    pub fn kappa(&self) -> f64 {
        (self.beta.0 * self.beta.1 - 1.0) / (self.beta.0 + self.beta.1 + 2.0)
    }

    /// H(t0) = 2 log(k/2)
    pub fn envelope_initial(&self) -> f64 {
        2.0 * (self.k / 2.0).ln()
    }
}

#[derive(Debug, Clone)]
pub struct StepControl {
    /// target relative growth per step
    pub growth_target: f64,
    /// hard cap on relative growth before a step is retried with dt/2
    pub growth_cap: f64,
    pub dt_init: f64,
    pub dt_max: f64,
    /// blow-up threshold on max z_i
    pub z_threshold: f64,
    /// dt underflow floor as a fraction of (horizon - t0)
    pub dt_floor_factor: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            growth_target: 0.02,
            growth_cap: 0.1,
            dt_init: 1e-4,
            dt_max: 0.05,
            z_threshold: 1e12,
            dt_floor_factor: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub z: (Vec<f64>, Vec<f64>),
    /// Z = log(z1 z2)
    pub big_z: Vec<f64>,
    /// lower envelope H at the recorded times (f64::INFINITY once blown up)
    pub envelope: Vec<f64>,
    pub blowup_detected: bool,
    pub t_blowup_numeric: Option<f64>,
    pub t_blowup_envelope: Option<f64>,
}

fn derivs(spec: &OdeSpec, t: f64, z1: f64, z2: f64) -> Result<(f64, f64)> {
    let f1 = (spec.f.0)(t);
    let f2 = (spec.f.1)(t);
    if f1 < 0.0 || f2 < 0.0 {
        return Err(Error::Validation(format!(
            "negative f sample at t={t}: ({f1}, {f2})"
        )));
    }
    Ok((
        spec.k * f1 * z2.powf(spec.beta.0),
        spec.k * f2 * z1.powf(spec.beta.1),
    ))
}

fn rk4_step(spec: &OdeSpec, t: f64, z1: f64, z2: f64, dt: f64) -> Result<(f64, f64)> {
    let (k1a, k1b) = derivs(spec, t, z1, z2)?;
    let (k2a, k2b) = derivs(spec, t + 0.5 * dt, z1 + 0.5 * dt * k1a, z2 + 0.5 * dt * k1b)?;
    let (k3a, k3b) = derivs(spec, t + 0.5 * dt, z1 + 0.5 * dt * k2a, z2 + 0.5 * dt * k2b)?;
    let (k4a, k4b) = derivs(spec, t + dt, z1 + dt * k3a, z2 + dt * k3b)?;
    Ok((
        z1 + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        z2 + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
    ))
}

/// Adaptive explicit integration of the comparison system.
pub fn integrate_system(spec: &OdeSpec, control: &StepControl) -> Result<OdeTrajectory> {
    let kappa = spec.kappa();
    let c_growth = spec.k * young_constant(spec.beta.0, spec.beta.1);
    let h0 = spec.envelope_initial();
    let budget = (-kappa * h0).exp();

    let mut t = spec.t0;
    let mut z1 = spec.k / 2.0;
    let mut z2 = spec.k / 2.0;
    let mut big_f_prev = spec.big_f(t);
    let mut acc_f = 0.0; // int_{t0}^t F, trapezoid on accepted steps
    let dt_floor = control.dt_floor_factor * (spec.horizon - spec.t0);

    let envelope_at = |acc: f64| -> f64 {
        let arg = budget - kappa * c_growth * acc;
        if arg <= 0.0 {
            f64::INFINITY
        } else {
            -arg.ln() / kappa
        }
    };

    let mut traj = OdeTrajectory {
        times: vec![t],
        z: (vec![z1], vec![z2]),
        big_z: vec![(z1 * z2).ln()],
        envelope: vec![envelope_at(0.0)],
        blowup_detected: false,
        t_blowup_numeric: None,
        t_blowup_envelope: None,
    };

    let mut dt = control.dt_init.min(control.dt_max);
    let mut prev_state: Option<(f64, f64, f64)> = None; // (t, z_max, z_max')

    loop {
        if t >= spec.horizon {
            break;
        }
        let (d1, d2) = derivs(spec, t, z1, z2)?;
        // growth-limited step proposal
        let rate = (d1 / z1).max(d2 / z2).max(1e-300);
        dt = dt
            .min(control.growth_target / rate)
            .min(control.dt_max)
            .min(spec.horizon - t);
        if dt < dt_floor {
            traj.blowup_detected = true;
            break;
        }
        let mut accepted = None;
        for _ in 0..64 {
            match rk4_step(spec, t, z1, z2, dt) {
                Ok((n1, n2)) if n1.is_finite() && n2.is_finite() => {
                    let growth = ((n1 - z1) / z1).max((n2 - z2) / z2);
                    if growth <= control.growth_cap {
                        accepted = Some((n1, n2));
                        break;
                    }
                }
                Ok(_) => {}
                Err(e) => return Err(e),
            }
            dt *= 0.5;
            if dt < dt_floor {
                break;
            }
        }
        let Some((n1, n2)) = accepted else {
            traj.blowup_detected = true;
            break;
        };
        let t_new = t + dt;
        let big_f_new = spec.big_f(t_new);
        acc_f += 0.5 * (big_f_prev + big_f_new) * dt;
        big_f_prev = big_f_new;
        prev_state = Some((t, z1.max(z2), d1.max(d2)));
        t = t_new;
        z1 = n1;
        z2 = n2;
        traj.times.push(t);
        traj.z.0.push(z1);
        traj.z.1.push(z2);
        traj.big_z.push((z1 * z2).ln());
        traj.envelope.push(envelope_at(acc_f));
        if z1.max(z2) > control.z_threshold {
            traj.blowup_detected = true;
            break;
        }
        // modest step recovery between accepted steps
        dt = (dt * 2.0).min(control.dt_max);
    }

    if traj.blowup_detected {
        // power-law extrapolation of the remaining time from the last two states
        let (dz1, dz2) = derivs(spec, t, z1, z2)?;
        let zmax = z1.max(z2);
        let dmax = dz1.max(dz2).max(1e-300);
        let p = match prev_state {
            Some((_, zp, dp)) if zp > 0.0 && dp > 0.0 && zmax > zp && dmax > dp => {
                (dmax / dp).ln() / (zmax / zp).ln()
            }
            _ => spec.beta.0.max(spec.beta.1),
        };
        let remaining = if p > 1.01 { zmax / ((p - 1.0) * dmax) } else { 0.0 };
        traj.t_blowup_numeric = Some(t + remaining);
    }
    traj.t_blowup_envelope = envelope_blowup_time(spec, kappa, c_growth);
    Ok(traj)
}

/// First time the two-constant envelope argument hits zero, or None on horizon.
fn envelope_blowup_time(spec: &OdeSpec, kappa: f64, c_growth: f64) -> Option<f64> {
    let target = (-kappa * spec.envelope_initial()).exp() / (kappa * c_growth);
    first_crossing(&|t| spec.big_f(t), spec.t0, spec.horizon, target)
}

/// Smallest t with int_{t0}^t F = target, by windowed march plus bisection.
fn first_crossing(big_f: &dyn Fn(f64) -> f64, t0: f64, horizon: f64, target: f64) -> Option<f64> {
    let n_windows = 4096;
    let dw = (horizon - t0) / n_windows as f64;
    let mut acc = 0.0;
    let mut lo = t0;
    for _ in 0..n_windows {
        let hi = lo + dw;
        let (w, _) = adaptive_simpson(&|t| big_f(t), lo, hi, 1e-12 * target.max(1e-12));
        if acc + w >= target {
            // bisect inside [lo, hi]
            let mut a = lo;
            let mut b = hi;
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let (wm, _) = adaptive_simpson(&|t| big_f(t), lo, m, 1e-13 * target.max(1e-12));
                if acc + wm >= target {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        acc += w;
        lo = hi;
    }
    None
}

/// Single-constant envelope H(t) = -(1/c) log(e^{-c H(t0)} - c^2 int_{t0}^t F),
/// with H(t0) = 2 log(k/2). Returns +infinity once the argument is exhausted.
pub fn envelope_h(spec: &OdeSpec, c: f64, t: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Validation(format!("c must be positive, got {c}")));
    }
    if t < spec.t0 {
        return Err(Error::Domain(format!("t={t} precedes t0={}", spec.t0)));
    }
    let h0 = spec.envelope_initial();
    if t == spec.t0 {
        return Ok(h0);
    }
    let (acc, _) = adaptive_simpson(&|s| spec.big_f(s), spec.t0, t, 1e-12);
    let arg = (-c * h0).exp() - c * c * acc;
    if arg <= 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(-arg.ln() / c)
    }
}

/// Optimal constant in y^{b_i+1} + x^{b_j+1} >= c (xy)^{(b_i+1)(b_j+1)/(b_i+b_j+2)}:
/// weighted AM-GM after the substitution r = x^{b_j+1}, s = y^{b_i+1} gives
/// c* = a^{-a} (1-a)^{-(1-a)} with a = (b_i+1)/(b_i+b_j+2).
pub fn young_constant(beta_i: f64, beta_j: f64) -> f64 {
    let a = (beta_i + 1.0) / (beta_i + beta_j + 2.0);
    a.powf(-a) * (1.0 - a).powf(-(1.0 - a))
}

/// Smallest t with c^2 int_{t0}^t F >= e^{-c H(t0)}; None if not reached by horizon.
pub fn blowup_time_bound(spec: &OdeSpec, big_f: &dyn Fn(f64) -> f64, c: f64) -> Result<Option<f64>> {
    if !(c > 0.0) {
        return Err(Error::Validation(format!("c must be positive, got {c}")));
    }
    let target = (-c * spec.envelope_initial()).exp() / (c * c);
    Ok(first_crossing(big_f, spec.t0, spec.horizon, target))
}
