//! Direct numerical evaluation of the outage region, used as an independent
//! check on the finite-sum route.
//!
//! `P_out = F_(l)(c) + ∫_c^∞ f_(l)(y) ∫_0^∞ F_ψ1(t(y, z)) f_ψ3(z) dz dy`,
//! with the order-statistic law built from the binomial form and both
//! integrals taken in logarithmic coordinates about the natural scale.

use crate::analytic::{check_user, user_order_statistic, AnalyticOptions};
use crate::error::Result;
use crate::params::{derive_constants, DerivedConstants, SystemConfig};
use crate::quadrature::integrate;
use crate::real::Real;

/// Outage probability of user `user` by nested adaptive quadrature.
pub fn op_oracle_2d<T: Real>(cfg: &SystemConfig<T>, user: usize) -> Result<T> {
    cfg.check_user(user)?;
    let c = derive_constants(cfg)?;
    op_oracle_2d_with(&c, user, &AnalyticOptions::default())
}

/// Upper end, in log units relative to the mean, beyond which a Gamma law of
/// this shape has negligible mass.
fn log_upper(shape: usize) -> f64 {
    ((80.0 + 2.0 * shape as f64) / shape as f64).ln()
}

const LOG_LOWER: f64 = -60.0;

pub fn op_oracle_2d_with<T: Real>(c: &DerivedConstants<T>, user: usize, opts: &AnalyticOptions<T>) -> Result<T> {
    check_user(c, user)?;
    let os = user_order_statistic(c, user)?;
    let Some(delta) = c.delta_max(user) else {
        return Ok(T::one());
    };
    let g = c.snr;
    let knee = c.hop2_noise * c.impairment_product * delta;
    let hop2_mean = os.law.mean();
    let li_mean = c.li_law.mean();
    let sr = c.sr_law;
    let li = c.li_law;

    let inner = |a: T| -> Result<T> {
        let r = integrate(
            |v: T| {
                let z = li_mean * v.exp();
                let need = a * (z * g * c.li_weight + c.hop1_noise);
                sr.cdf(need) * li.pdf(z) * z
            },
            T::lit(LOG_LOWER),
            T::lit(log_upper(li.shape)),
            opts.oracle_inner,
        )?;
        Ok(r.value)
    };

    let mut failure: Option<crate::error::Error> = None;
    let outer = integrate(
        |u: T| {
            if failure.is_some() {
                return T::zero();
            }
            let w = hop2_mean * u.exp();
            let y = knee + w;
            let f = os.pdf_binomial(y);
            if f == T::zero() {
                return T::zero();
            }
            let a = (y * g + c.hop2_noise) * c.impairment_product * delta / (g * w);
            match inner(a) {
                Ok(v) => f * v * w,
                Err(e) => {
                    failure = Some(e);
                    T::zero()
                }
            }
        },
        T::lit(LOG_LOWER),
        T::lit(log_upper(os.law.shape) + (os.users as f64).ln()),
        opts.oracle_outer,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    Ok((os.cdf_binomial(knee) + outer.value).min(T::one()))
}
