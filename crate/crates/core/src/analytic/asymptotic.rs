//! High-SNR behaviour: diversity order and array gain with perfect channel
//! knowledge, and the error floors otherwise.

use crate::analytic::{op_exact_with, AnalyticOptions};
use crate::error::Result;
use crate::params::{derive_constants, SystemConfig};
use crate::real::Real;
use crate::specfun::{binomial, factorial, gamma_int};

/// Reference SNR (linear) at which the estimation-error floor is evaluated.
pub const CEE_REFERENCE_SNR: f64 = 1e6;

/// Diversity orders closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `P_out ≈ (AG · γ̄)^{-DO}`.
    IdealDiversity,
    /// Loop interference grows with transmit power (`μ = 1`).
    LiFloor,
    /// Imperfect channel estimation.
    CeeFloor,
    /// Some stage can never be decoded.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteReport<T> {
    pub regime: Regime,
    /// Zero in every floor regime.
    pub diversity_order: T,
    pub array_gain: Option<T>,
    pub floor: Option<T>,
    /// `(1 - μ) m_SR N_S`.
    pub first_hop_order: T,
    /// `m_l N_D l`.
    pub second_hop_order: T,
    pub first_hop_gain: Option<T>,
    pub second_hop_gain: Option<T>,
    /// Relative change of the estimation-error floor between the reference
    /// SNR and ten times it.
    pub floor_drift: Option<T>,
}

impl<T: Real> AsymptoteReport<T> {
    /// The asymptote at linear SNR `snr`.
    pub fn probability(&self, snr: T) -> T {
        match (self.regime, self.array_gain, self.floor) {
            (Regime::IdealDiversity, Some(ag), _) => (ag * snr).powf(-self.diversity_order).min(T::one()),
            (_, _, Some(floor)) => floor,
            _ => T::one(),
        }
    }

    /// Both hop terms `(χ1 γ̄)^{-D1} + (χ2 γ̄)^{-D2}` without dropping the
    /// slower one.
    pub fn two_term(&self, snr: T) -> Option<T> {
        let a = self.first_hop_gain?;
        let b = self.second_hop_gain?;
        Some((a * snr).powf(-self.first_hop_order) + (b * snr).powf(-self.second_hop_order))
    }
}

/// High-SNR description of user `user`'s outage probability.
pub fn op_asymptotic<T: Real>(cfg: &SystemConfig<T>, user: usize) -> Result<AsymptoteReport<T>> {
    cfg.check_user(user)?;
    let c = derive_constants(cfg)?;
    let k1 = c.sr_law.shape;
    let k2 = c.ru_laws[user - 1].shape;
    let mu = cfg.li_quality;
    let d1 = (T::one() - mu) * T::count(k1);
    let d2 = T::count(k2 * user);
    let mut report = AsymptoteReport {
        regime: Regime::Infeasible,
        diversity_order: T::zero(),
        array_gain: None,
        floor: Some(T::one()),
        first_hop_order: d1,
        second_hop_order: d2,
        first_hop_gain: None,
        second_hop_gain: None,
        floor_drift: None,
    };
    let Some(delta) = c.delta_max(user) else {
        return Ok(report);
    };
    // γ̄ δ† does not depend on the SNR.
    let lambda_norm = c.snr * delta;
    let imp_sr = T::one() + cfg.kappa_sr * cfg.kappa_sr;
    let imp_ru = T::one() + cfg.kappa_ru * cfg.kappa_ru;

    if !cfg.is_ideal() {
        let floor_at = |snr: f64| -> Result<T> {
            let shifted = cfg.with_snr_db(T::lit(10.0 * snr.log10()));
            let cs = derive_constants(&shifted)?;
            let g = cs.snr;
            let limit = cs.with_noise_terms(g * cfg.cee_var_ru, g * cfg.cee_var_sr);
            Ok(op_exact_with(&limit, user, &AnalyticOptions::default())?.value)
        };
        let floor = floor_at(CEE_REFERENCE_SNR)?;
        let further = floor_at(CEE_REFERENCE_SNR * 10.0)?;
        report.regime = Regime::CeeFloor;
        report.floor = Some(floor);
        report.floor_drift = Some(if floor > T::zero() {
            ((further - floor) / floor).abs()
        } else {
            T::zero()
        });
        return Ok(report);
    }

    if mu >= T::one() {
        let x = imp_ru * lambda_norm;
        let u = T::count(c.m_sr) / c.omega_sr * x;
        let beta3 = T::count(c.m_li) / cfg.li_scale;
        let rho = beta3 / (u + beta3);
        let tau = u / (u + beta3);
        let m_li = c.m_li;
        let survive: T = (0..k1)
            .map(|n| {
                gamma_int::<T>(n + m_li) / (factorial::<T>(n) * gamma_int::<T>(m_li))
                    * rho.powi(m_li as i32)
                    * tau.powi(n as i32)
            })
            .sum();
        report.regime = Regime::LiFloor;
        report.floor = Some((T::one() - survive).max(T::zero()));
        return Ok(report);
    }

    let m_l = c.m_ru[user - 1];
    let omega_l = c.omega_ru[user - 1];
    let k1t = T::count(k1);
    let head = gamma_int::<T>(k1 + c.m_li) / (factorial::<T>(k1) * gamma_int::<T>(c.m_li));
    let base = imp_ru * lambda_norm * T::count(c.m_sr) * cfg.li_scale / (c.omega_sr * T::count(c.m_li));
    let chi1 = (head * base.powi(k1 as i32)).powf(-T::one() / ((T::one() - mu) * k1t));
    let lead = binomial::<T>(c.num_users(), user) / factorial::<T>(k2).powi(user as i32);
    let chi2 = lead.powf(-T::one() / T::count(k2 * user)) * omega_l / (imp_sr * lambda_norm * T::count(m_l));

    let (order, gain) = if (d1 - d2).abs() <= T::lit(TIE_TOLERANCE) {
        let d = d1;
        (d, (chi1.powf(-d) + chi2.powf(-d)).powf(-T::one() / d))
    } else if d1 < d2 {
        (d1, chi1)
    } else {
        (d2, chi2)
    };
    report.regime = Regime::IdealDiversity;
    report.diversity_order = order;
    report.array_gain = Some(gain);
    report.floor = None;
    report.first_hop_gain = Some(chi1);
    report.second_hop_gain = Some(chi2);
    Ok(report)
}
