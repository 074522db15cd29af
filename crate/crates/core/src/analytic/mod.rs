//! Closed-form and semi-closed-form outage probability: the exact finite-sum
//! expression, a direct two-dimensional quadrature used as its oracle, the
//! harmonic-mean lower bound, and the high-SNR asymptotes.

mod asymptotic;
mod bound;
mod exact;
mod oracle;

pub use asymptotic::{op_asymptotic, AsymptoteReport, Regime, CEE_REFERENCE_SNR, TIE_TOLERANCE};
pub use bound::{op_lower_bound, op_lower_bound_with, w_cdf, w_sf};
pub use exact::{op_exact, op_exact_detailed, op_exact_with, theta_l_integral, ExactOutage, ThetaIntegral, ThetaParams};
pub use oracle::{op_oracle_2d, op_oracle_2d_with};

use crate::error::{Error, Result};
use crate::params::DerivedConstants;
use crate::quadrature::QuadratureOptions;
use crate::real::Real;
use crate::specfun::{GammaLaw, OrderStatistic};

/// Tolerances for every quadrature the analytic routes perform.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticOptions<T> {
    /// Per-integral tolerance for `Θ_l`.
    pub theta: QuadratureOptions<T>,
    /// Outer (ψ2) integral of the two-dimensional oracle.
    pub oracle_outer: QuadratureOptions<T>,
    /// Inner (ψ3) integral of the two-dimensional oracle.
    pub oracle_inner: QuadratureOptions<T>,
    /// The exact route fails with [`Error::Cancellation`] when its estimated
    /// absolute error exceeds this fraction of the result.
    pub max_relative_error: T,
}

impl<T: Real> Default for AnalyticOptions<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(1e3);
        let tight = T::lit(1e-13).max(floor);
        Self {
            theta: QuadratureOptions {
                abs_tol: T::zero(),
                rel_tol: tight,
                max_subdivisions: 500,
            },
            oracle_outer: QuadratureOptions {
                abs_tol: T::zero(),
                rel_tol: T::lit(1e-10).max(floor),
                max_subdivisions: 1000,
            },
            oracle_inner: QuadratureOptions {
                abs_tol: T::zero(),
                rel_tol: T::lit(1e-12).max(floor),
                max_subdivisions: 1000,
            },
            max_relative_error: T::lit(1e-2),
        }
    }
}

/// Order-statistic law of user `user` when every user shares one fading law.
pub(crate) fn user_order_statistic<T: Real>(c: &DerivedConstants<T>, user: usize) -> Result<OrderStatistic<T>> {
    let law = identical_user_law(c)?;
    OrderStatistic::new(user, c.num_users(), law)
}

pub(crate) fn identical_user_law<T: Real>(c: &DerivedConstants<T>) -> Result<GammaLaw<T>> {
    let first = c.ru_laws[0];
    if c.ru_laws.iter().all(|l| *l == first) {
        Ok(first)
    } else {
        Err(Error::NonIdenticalUsers(
            "relay-to-user distances, shapes or estimation errors differ between users".to_string(),
        ))
    }
}

pub(crate) fn check_user<T: Real>(c: &DerivedConstants<T>, user: usize) -> Result<()> {
    if user == 0 || user > c.num_users() {
        Err(Error::User {
            user,
            users: c.num_users(),
        })
    } else {
        Ok(())
    }
}

/// Integration range `[u_lo, u_hi]` in `u = ln x` outside of which
/// `exp(h(u) - h(u*))` has fallen below `e^{-drop}`. `h` must be unimodal.
pub(crate) fn log_window<T: Real, H: Fn(T) -> T>(h: &H, mode: T, drop: T) -> (T, T) {
    let peak = h(mode);
    let mut step = T::one();
    let mut lo = mode - step;
    while h(lo) > peak - drop && step < T::lit(1e4) {
        step = step * T::lit(2.0);
        lo = mode - step;
    }
    step = T::one();
    let mut hi = mode + step;
    while h(hi) > peak - drop && step < T::lit(1e4) {
        step = step * T::lit(2.0);
        hi = mode + step;
    }
    (lo, hi)
}

/// Root of a strictly decreasing function by bracketing and bisection.
pub(crate) fn decreasing_root<T: Real, F: Fn(T) -> T>(f: &F, start: T) -> Option<T> {
    let mut lo = start;
    let mut hi = start;
    let mut step = T::one();
    let limit = T::lit(2048.0);
    while f(lo) <= T::zero() {
        lo = start - step;
        step = step * T::lit(2.0);
        if step > limit {
            return None;
        }
    }
    step = T::one();
    while f(hi) >= T::zero() {
        hi = start + step;
        step = step * T::lit(2.0);
        if step > limit {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(T::lit(0.5) * (lo + hi))
}
