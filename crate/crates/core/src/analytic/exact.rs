//! Exact outage probability as a finite sum of one-dimensional integrals.
//!
//! Conditioning on `ψ2 = x + c` with `c = ϑ2 ϑ3 δ†`, the first-hop condition
//! is averaged in closed form over `ψ1` and `ψ3`. What remains is a sum of
//! terms `coef · Θ(p, α, β, s, q)` with
//!
//! `Θ = ∫_0^∞ x^p e^{-α x - β/x} (x + s)^{-q} dx`.
//!
//! Terms sharing `(p, m, rate multiple)` share one `Θ`; they are merged before
//! any integral is evaluated.

use std::collections::BTreeMap;

use crate::analytic::{check_user, decreasing_root, log_window, user_order_statistic, AnalyticOptions};
use crate::error::{Error, Result};
use crate::params::{derive_constants, DerivedConstants, SystemConfig};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::real::{CompensatedSum, Real};
use crate::specfun::{binomial, factorial, gamma_int};

/// Parameters of `Θ = ∫_0^∞ x^power e^{-decay x - inverse_decay / x} (x + shift)^{-exponent} dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams<T> {
    pub power: i32,
    pub decay: T,
    pub inverse_decay: T,
    pub shift: T,
    pub exponent: usize,
}

/// `Θ = exp(ln_scale) · value`, with `error` on the same scale as `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaIntegral<T> {
    pub ln_scale: T,
    pub value: T,
    pub error: T,
}

impl<T: Real> ThetaIntegral<T> {
    pub fn total(&self) -> T {
        self.ln_scale.exp() * self.value
    }

    pub fn total_error(&self) -> T {
        self.ln_scale.exp() * self.error
    }
}

impl<T: Real> ThetaParams<T> {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Argument(format!("theta integral: {what}")));
        if !(self.decay > T::zero()) || !self.decay.is_finite() {
            return bad("decay must be positive and finite");
        }
        if !(self.inverse_decay >= T::zero()) || !self.inverse_decay.is_finite() {
            return bad("inverse decay must be non-negative and finite");
        }
        if !(self.shift >= T::zero()) || !self.shift.is_finite() {
            return bad("shift must be non-negative and finite");
        }
        if self.inverse_decay == T::zero() {
            let near_zero = if self.shift > T::zero() {
                self.power
            } else {
                self.power - self.exponent as i32
            };
            if near_zero <= -1 {
                return bad("integrand is not integrable at the origin");
            }
        }
        Ok(())
    }

    /// `ln(x^{p+1} e^{-αx-β/x} (x+s)^{-q})` at `x = e^u`: the log-integrand
    /// after the substitution `x = e^u`.
    fn log_integrand(&self, u: T) -> T {
        let q = T::count(self.exponent);
        let x = u.exp();
        let mut h = T::from_i32(self.power + 1).unwrap() * u - self.decay * x;
        if self.inverse_decay > T::zero() {
            h = h - self.inverse_decay * (-u).exp();
        }
        if self.exponent > 0 {
            let ln_sum = if self.shift == T::zero() {
                u
            } else if u > self.shift.ln() {
                u + (self.shift * (-u).exp()).ln_1p()
            } else {
                self.shift.ln() + (x / self.shift).ln_1p()
            };
            h = h - q * ln_sum;
        }
        h
    }

    fn log_integrand_slope(&self, u: T) -> T {
        let q = T::count(self.exponent);
        let mut d = T::from_i32(self.power + 1).unwrap() - self.decay * u.exp();
        if self.inverse_decay > T::zero() {
            d = d + self.inverse_decay * (-u).exp();
        }
        if self.exponent > 0 {
            d = d - if self.shift == T::zero() {
                q
            } else {
                q / (T::one() + self.shift * (-u).exp())
            };
        }
        d
    }
}

/// Evaluates `Θ` on the log scale.
///
/// After `x = e^u` the integrand is log-concave in `u` with doubly-exponential
/// decay on at least one side, so a finite window around the mode captures it
/// to full precision.
pub fn theta_l_integral<T: Real>(params: &ThetaParams<T>, opts: QuadratureOptions<T>) -> Result<ThetaIntegral<T>> {
    params.validate()?;
    let h = |u: T| params.log_integrand(u);
    let slope = |u: T| params.log_integrand_slope(u);
    let start = -params.decay.ln();
    let mode = decreasing_root(&slope, start)
        .ok_or_else(|| Error::Argument(format!("theta integral: no interior mode for {params:?}")))?;
    let peak = h(mode);
    let (lo, hi) = log_window(&h, mode, T::lit(60.0));
    let f = |u: T| (h(u) - peak).exp();
    let left = integrate(f, lo, mode, opts)?;
    let right = integrate(f, mode, hi, opts)?;
    Ok(ThetaIntegral {
        ln_scale: peak,
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

/// Result of the exact route with its accuracy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOutage<T> {
    pub value: T,
    /// Estimated absolute error from quadrature and rounding.
    pub error_estimate: T,
    /// `Σ |term|` before merging; large values relative to `1` mean the
    /// subtraction `1 - Σ` costs digits.
    pub magnitude: T,
    /// Number of distinct `Θ` integrals evaluated.
    pub integrals: usize,
}

impl<T: Real> ExactOutage<T> {
    fn certain() -> Self {
        Self {
            value: T::one(),
            error_estimate: T::zero(),
            magnitude: T::one(),
            integrals: 0,
        }
    }
}

/// Exact outage probability of user `user` (1-based).
pub fn op_exact<T: Real>(cfg: &SystemConfig<T>, user: usize) -> Result<T> {
    Ok(op_exact_detailed(cfg, user, &AnalyticOptions::default())?.value)
}

pub fn op_exact_detailed<T: Real>(cfg: &SystemConfig<T>, user: usize, opts: &AnalyticOptions<T>) -> Result<ExactOutage<T>> {
    cfg.check_user(user)?;
    let c = derive_constants(cfg)?;
    op_exact_with(&c, user, opts)
}

struct Group<T: Real> {
    sum: CompensatedSum<T>,
    abs: T,
}

/// Exact route on precomputed constants.
pub fn op_exact_with<T: Real>(c: &DerivedConstants<T>, user: usize, opts: &AnalyticOptions<T>) -> Result<ExactOutage<T>> {
    check_user(c, user)?;
    let os = user_order_statistic(c, user)?;
    let Some(delta) = c.delta_max(user) else {
        return Ok(ExactOutage::certain());
    };

    let g = c.snr;
    let beta1 = c.sr_law.rate;
    let beta2 = os.law.rate;
    let beta3 = c.li_law.rate;
    let k1 = c.sr_law.shape;
    let m_li = c.m_li;

    let knee = c.hop2_noise * c.impairment_product * delta;
    let e = knee + c.hop2_noise / g;
    let a0 = g * c.impairment_product * c.li_weight * delta * beta1;
    let b0 = c.impairment_product * c.hop1_noise * delta * beta1;
    let denom = a0 + beta3;
    let rho = beta3 / denom;
    let tau = a0 / denom;
    let shift = a0 * e / denom;
    let inverse_decay = b0 * e;
    let gamma_li = gamma_int::<T>(m_li);
    let rho_pow = rho.powi(m_li as i32);
    let e_b0 = (-b0).exp();

    let mut groups: BTreeMap<(i32, usize, usize), Group<T>> = BTreeMap::new();
    for n in 0..k1 {
        let n_fact = factorial::<T>(n);
        for m in 0..=n {
            let w = binomial::<T>(n, m) * gamma_int::<T>(m + m_li) / (gamma_li * n_fact)
                * rho_pow
                * tau.powi(m as i32)
                * b0.powi((n - m) as i32)
                * e_b0;
            if w == T::zero() {
                continue;
            }
            for term in os.pdf_terms() {
                let pw = term.power;
                let r = term.rate_mult;
                let knee_decay = (-(beta2 * T::count(r) * knee)).exp();
                for n2 in 0..=pw {
                    let knee_pow = knee.powi((pw - n2) as i32);
                    if knee_pow == T::zero() {
                        continue;
                    }
                    let base = w * term.coef * binomial::<T>(pw, n2) * knee_pow * knee_decay;
                    for n3 in 0..=n {
                        let e_pow = e.powi((n - n3) as i32);
                        if e_pow == T::zero() {
                            continue;
                        }
                        let coef = base * binomial::<T>(n, n3) * e_pow;
                        let p = (n2 + n3 + m + m_li) as i32 - n as i32;
                        let slot = groups.entry((p, m, r)).or_insert_with(|| Group {
                            sum: CompensatedSum::new(),
                            abs: T::zero(),
                        });
                        slot.sum.add(coef);
                        slot.abs = slot.abs + coef.abs();
                    }
                }
            }
        }
    }

    let mut success = CompensatedSum::new();
    let mut quad_error = T::zero();
    let mut magnitude = T::zero();
    let mut integrals = 0;
    for (&(p, m, r), group) in &groups {
        let coef = group.sum.value();
        if coef == T::zero() && group.abs == T::zero() {
            continue;
        }
        let theta = theta_l_integral(
            &ThetaParams {
                power: p,
                decay: beta2 * T::count(r),
                inverse_decay,
                shift,
                exponent: m + m_li,
            },
            opts.theta,
        )?;
        integrals += 1;
        let scale = |a: T| {
            if a == T::zero() {
                T::zero()
            } else {
                (a.abs().ln() + theta.ln_scale).exp()
            }
        };
        let term = scale(coef) * theta.value;
        success.add(if coef < T::zero() { -term } else { term });
        quad_error = quad_error + scale(coef) * theta.error;
        magnitude = magnitude + scale(group.abs) * theta.value;
    }

    let raw = T::one() - success.value();
    let rounding = T::lit(8.0) * T::epsilon() * (magnitude + T::one());
    let error_estimate = quad_error + rounding;
    let value = raw.max(T::zero()).min(T::one());
    if !value.is_finite() || error_estimate > opts.max_relative_error * value {
        return Err(Error::Cancellation {
            value: raw.to_f64_lossy(),
            magnitude: magnitude.to_f64_lossy(),
            estimated_error: error_estimate.to_f64_lossy(),
        });
    }
    Ok(ExactOutage {
        value,
        error_estimate,
        magnitude,
        integrals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_semi_infinite;

    fn theta(p: i32, a: f64, b: f64, s: f64, q: usize) -> f64 {
        theta_l_integral(
            &ThetaParams {
                power: p,
                decay: a,
                inverse_decay: b,
                shift: s,
                exponent: q,
            },
            QuadratureOptions::relative(1e-13),
        )
        .unwrap()
        .total()
    }

    #[test]
    fn reduces_to_gamma_function() {
        // ∫ x^3 e^{-2x} dx = 3!/2^4
        assert!((theta(3, 2.0, 0.0, 0.0, 0) - 6.0 / 16.0).abs() < 1e-14);
        // ∫ x^4 e^{-x} / x^2 dx = 2
        assert!((theta(4, 1.0, 0.0, 0.0, 2) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn bessel_closed_form() {
        // ∫ e^{-x-1/x} dx = 2 K_1(2)
        let k1_2 = 0.139_865_881_816_522_43;
        assert!((theta(0, 1.0, 1.0, 0.0, 0) / (2.0 * k1_2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_quadrature() {
        for &(p, a, b, s, q) in &[
            (2, 0.3, 0.5, 1.2, 2),
            (-1, 0.125, 1e-6, 0.4, 1),
            (5, 0.25, 2.0, 10.0, 3),
            (0, 4.0, 0.01, 1e-3, 1),
        ] {
            let direct = integrate_semi_infinite(
                |x: f64| {
                    if x == 0.0 {
                        0.0
                    } else {
                        x.powi(p) * (-a * x - b / x).exp() * (x + s).powi(-(q as i32))
                    }
                },
                0.0,
                1.0,
                QuadratureOptions {
                    abs_tol: 0.0,
                    rel_tol: 1e-12,
                    max_subdivisions: 5000,
                },
            )
            .unwrap()
            .value;
            let ours = theta(p, a, b, s, q);
            assert!((ours / direct - 1.0).abs() < 1e-9, "{p} {a} {b} {s} {q}: {ours} vs {direct}");
        }
    }

    #[test]
    fn rejects_divergent_parameters() {
        let bad = ThetaParams {
            power: -1,
            decay: 1.0,
            inverse_decay: 0.0,
            shift: 1.0,
            exponent: 1,
        };
        assert!(theta_l_integral(&bad, QuadratureOptions::relative(1e-10)).is_err());
    }

    #[test]
    fn infeasible_user_is_certain_outage() {
        let mut cfg = SystemConfig::<f64>::default();
        cfg.thresholds[1] = 10.0;
        assert_eq!(op_exact(&cfg, 2).unwrap(), 1.0);
        assert_eq!(op_exact(&cfg, 3).unwrap(), 1.0);
        assert!(op_exact(&cfg, 1).unwrap() < 1.0);
    }

    #[test]
    fn rejects_bad_user_index() {
        let cfg = SystemConfig::<f64>::default();
        assert!(matches!(op_exact(&cfg, 0), Err(Error::User { .. })));
        assert!(matches!(op_exact(&cfg, 4), Err(Error::User { .. })));
    }
}
