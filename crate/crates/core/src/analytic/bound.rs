//! Lower bound from `XY/(X+Y+1) ≤ min(X, Y)`.
//!
//! With `W = γ̄ ψ1 / (γ̄ ψ3 + ϑ5/ϑ4)` the first hop succeeds only if
//! `W > γ̄ ϑ3 ϑ4 δ†` and the second only if `ψ2 > ϑ2 ϑ3 δ†`. The two events
//! are independent, so their joint probability bounds the success
//! probability from above.

use crate::analytic::{check_user, user_order_statistic};
use crate::error::Result;
use crate::params::{derive_constants, DerivedConstants, SystemConfig};
use crate::real::{CompensatedSum, Real};
use crate::specfun::{binomial, factorial, gamma_int};

/// `Pr[W > x]`, a finite positive sum.
pub fn w_sf<T: Real>(x: T, c: &DerivedConstants<T>) -> T {
    if x <= T::zero() {
        return T::one();
    }
    let u = c.sr_law.rate * x;
    let beta3 = c.li_law.rate;
    let v = u * c.hop1_noise / (c.snr * c.li_weight);
    let rho = beta3 / (u + beta3);
    let tau = u / (u + beta3);
    let m_li = c.m_li;
    let rho_pow = rho.powi(m_li as i32);
    let gamma_li = gamma_int::<T>(m_li);
    let mut acc = CompensatedSum::new();
    for n in 0..c.sr_law.shape {
        let n_fact = factorial::<T>(n);
        for k in 0..=n {
            acc.add(
                binomial::<T>(n, k) / n_fact * gamma_int::<T>(k + m_li) / gamma_li
                    * rho_pow
                    * tau.powi(k as i32)
                    * v.powi((n - k) as i32),
            );
        }
    }
    ((-v).exp() * acc.value()).min(T::one())
}

/// `Pr[W ≤ x]`.
pub fn w_cdf<T: Real>(x: T, c: &DerivedConstants<T>) -> T {
    T::one() - w_sf(x, c)
}

/// Lower bound on the outage probability of user `user`.
pub fn op_lower_bound<T: Real>(cfg: &SystemConfig<T>, user: usize) -> Result<T> {
    cfg.check_user(user)?;
    op_lower_bound_with(&derive_constants(cfg)?, user)
}

pub fn op_lower_bound_with<T: Real>(c: &DerivedConstants<T>, user: usize) -> Result<T> {
    check_user(c, user)?;
    let os = user_order_statistic(c, user)?;
    let Some(delta) = c.delta_max(user) else {
        return Ok(T::one());
    };
    let first = w_sf(c.snr * c.impairment_product * c.li_weight * delta, c);
    let second = os.sf(c.hop2_noise * c.impairment_product * delta);
    Ok((T::one() - first * second).max(T::zero()).min(T::one()))
}
