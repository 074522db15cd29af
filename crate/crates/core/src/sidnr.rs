//! Instantaneous end-to-end SIDNR and per-realisation outage decisions.

use crate::channel::ChannelDraw;
use crate::params::DerivedConstants;
use crate::real::Real;

/// `γ_th = 2^{R0} - 1` for a target rate of `R0` bits per channel use.
pub fn threshold_from_rate<T: Real>(bits_per_use: T) -> T {
    T::lit(2.0).powf(bits_per_use) - T::one()
}

/// SIDNR of a stage whose desired power share is `desired` and whose
/// residual interference share (IUI plus imperfect SIC) is `interference`.
#[allow(clippy::too_many_arguments)]
pub fn sidnr_raw<T: Real>(
    sr_gain: T,
    ru_gain: T,
    li_gain: T,
    desired: T,
    interference: T,
    c: &DerivedConstants<T>,
) -> T {
    let g = c.snr;
    let signal = sr_gain * ru_gain * g * g;
    let denom = signal * (interference + c.distortion)
        + sr_gain * g * c.hop2_noise * c.impairment_product
        + (ru_gain * g + c.hop2_noise) * (li_gain * g * c.li_weight + c.hop1_noise) * c.impairment_product;
    signal * desired / denom
}

/// SIDNR at which user `user` decodes stage `stage` (`1 ≤ stage ≤ user`).
pub fn sidnr<T: Real>(draw: &ChannelDraw<T>, c: &DerivedConstants<T>, user: usize, stage: usize) -> T {
    debug_assert!(stage >= 1 && stage <= user && user <= c.num_users());
    let j = stage - 1;
    sidnr_raw(
        draw.sr_gain,
        draw.ru_gain(user),
        draw.li_gain,
        c.power_coeffs[j],
        c.iui[j] + c.ipsic[j],
        c,
    )
}

/// True when user `user` fails to decode any stage `j ≤ user`. A stage that
/// sits exactly on its threshold counts as a failure.
pub fn outage_indicator<T: Real>(draw: &ChannelDraw<T>, c: &DerivedConstants<T>, user: usize) -> bool {
    if !c.is_feasible(user) {
        return true;
    }
    (1..=user).any(|j| sidnr(draw, c, user, j) <= c.thresholds[j - 1])
}

/// The same decision expressed as a region in `(ψ1, ψ2, ψ3)` space through
/// `δ†_l`, without forming any SIDNR.
pub fn outage_indicator_region<T: Real>(draw: &ChannelDraw<T>, c: &DerivedConstants<T>, user: usize) -> bool {
    let Some(delta) = c.delta_max(user) else {
        return true;
    };
    let psi2 = draw.ru_gain(user);
    let knee = c.hop2_noise * c.impairment_product * delta;
    if psi2 <= knee {
        return true;
    }
    let g = c.snr;
    let need = (psi2 * g + c.hop2_noise) * (draw.li_gain * g * c.li_weight + c.hop1_noise) * c.impairment_product * delta
        / (g * (psi2 - knee));
    draw.sr_gain <= need
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{seeded_stream, ChannelSampler};
    use crate::params::{derive_constants, SystemConfig};

    fn single_user() -> SystemConfig<f64> {
        SystemConfig {
            d_ru: vec![0.5],
            power_coeffs: vec![1.0],
            thresholds: vec![1.0],
            snr_db: 10.0,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn hand_evaluated_single_user() {
        let c = derive_constants(&single_user()).unwrap();
        let d = ChannelDraw::new(1.0, vec![1.0], 0.0);
        let v = sidnr(&d, &c, 1, 1);
        assert!((v - 100.0 / 21.0).abs() < 1e-12);
    }

    #[test]
    fn zero_power_share_gives_zero() {
        let c = derive_constants(&SystemConfig::<f64>::default()).unwrap();
        let v = sidnr_raw(3.0, 2.0, 0.1, 0.0, 0.5, &c);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn interference_limited_at_high_snr() {
        let c = derive_constants(&SystemConfig::<f64>::default().with_snr_db(80.0)).unwrap();
        let d = ChannelDraw::new(2.0, vec![1.0, 1.5, 3.0], 0.0);
        let v = sidnr(&d, &c, 3, 1);
        assert!((v - 0.5 / 0.5).abs() < 1e-6);
        let v = sidnr(&d, &c, 3, 2);
        assert!((v - (1.0 / 3.0) / (1.0 / 6.0)).abs() < 1e-6);
    }

    #[test]
    fn infeasible_is_always_outage() {
        let mut cfg = SystemConfig::<f64>::default();
        cfg.thresholds[0] = 1.2;
        let c = derive_constants(&cfg).unwrap();
        let d = ChannelDraw::new(1e12, vec![1e12; 3], 0.0);
        for l in 1..=3 {
            assert!(outage_indicator(&d, &c, l));
            assert!(outage_indicator_region(&d, &c, l));
        }
    }

    #[test]
    fn huge_gains_never_outage() {
        let c = derive_constants(&SystemConfig::<f64>::default()).unwrap();
        let d = ChannelDraw::new(1e12, vec![1e12; 3], 0.0);
        for l in 1..=3 {
            assert!(!outage_indicator(&d, &c, l));
        }
    }

    #[test]
    fn rate_threshold_helper() {
        assert_eq!(threshold_from_rate(1.0), 1.0);
        assert!((threshold_from_rate(0.5f64) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn two_formulations_agree_on_random_draws() {
        let cfg = SystemConfig {
            kappa_sr: 0.1,
            kappa_ru: 0.05,
            cee_var_sr: 0.02,
            cee_var_ru: 0.03,
            ipsic_var: 0.02,
            tx_antennas: 2,
            rx_antennas: 2,
            snr_db: 12.0,
            ..SystemConfig::default()
        };
        let c = derive_constants(&cfg).unwrap();
        let s = ChannelSampler::new(&c);
        let mut rng = seeded_stream(99, 0);
        let mut mismatches = 0;
        for _ in 0..100_000 {
            let d: ChannelDraw<f64> = s.draw(&mut rng);
            for l in 1..=3 {
                if outage_indicator(&d, &c, l) != outage_indicator_region(&d, &c, l) {
                    mismatches += 1;
                }
            }
        }
        assert_eq!(mismatches, 0);
    }
}
