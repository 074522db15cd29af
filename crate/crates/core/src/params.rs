//! System configuration, its invariants, and the constants derived from it.
//!
//! Noise power is normalised to one, so transmit power equals the linear
//! average SNR and the residual loop-interference power is `λ γ̄^(μ-1)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::GammaLaw;

/// Every user-facing parameter of the relay network.
///
/// Users are indexed from 1 in all public APIs; vectors here are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<T> {
    /// BS transmit antennas (MRT).
    pub tx_antennas: usize,
    /// Per-user receive antennas (MRC).
    pub rx_antennas: usize,
    pub m_sr: usize,
    pub m_ru: usize,
    pub m_li: usize,
    /// Optional per-user override of `m_ru`. Only the simulator honours a
    /// non-uniform override; analytic routes require i.i.d. users.
    pub m_ru_users: Option<Vec<usize>>,
    pub path_loss_exponent: T,
    pub d_sr: T,
    /// Relay to user distances, one per user.
    pub d_ru: Vec<T>,
    /// Loop-interference cancellation quality `μ` in `[0, 1]`.
    pub li_quality: T,
    /// Loop-interference scale `λ`.
    pub li_scale: T,
    pub power_coeffs: Vec<T>,
    /// Linear SIDNR thresholds, one per decoding stage.
    pub thresholds: Vec<T>,
    pub kappa_sr: T,
    pub kappa_ru: T,
    pub cee_var_sr: T,
    pub cee_var_ru: T,
    pub ipsic_var: T,
    pub snr_db: T,
}

impl<T: Real> Default for SystemConfig<T> {
    /// Three users, `a = (1/2, 1/3, 1/6)`, thresholds `(0.9, 1.5, 2)`,
    /// `α = 3`, `λ = 1`, all distances 0.5, Rayleigh fading, single antennas,
    /// ideal hardware, `μ = 0.2`, 10 dB.
    fn default() -> Self {
        let half = T::lit(0.5);
        Self {
            tx_antennas: 1,
            rx_antennas: 1,
            m_sr: 1,
            m_ru: 1,
            m_li: 1,
            m_ru_users: None,
            path_loss_exponent: T::lit(3.0),
            d_sr: half,
            d_ru: vec![half; 3],
            li_quality: T::lit(0.2),
            li_scale: T::one(),
            power_coeffs: vec![half, T::one() / T::lit(3.0), T::one() / T::lit(6.0)],
            thresholds: vec![T::lit(0.9), T::lit(1.5), T::lit(2.0)],
            kappa_sr: T::zero(),
            kappa_ru: T::zero(),
            cee_var_sr: T::zero(),
            cee_var_ru: T::zero(),
            ipsic_var: T::zero(),
            snr_db: T::lit(10.0),
        }
    }
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

impl<T: Real> SystemConfig<T> {
    pub fn num_users(&self) -> usize {
        self.power_coeffs.len()
    }

    pub fn snr_linear(&self) -> T {
        db_to_linear(self.snr_db)
    }

    /// Shape of user `user`'s relay-to-user link (1-based).
    pub fn m_user(&self, user: usize) -> usize {
        match &self.m_ru_users {
            Some(v) => v[user - 1],
            None => self.m_ru,
        }
    }

    pub fn with_snr_db(&self, snr_db: T) -> Self {
        Self {
            snr_db,
            ..self.clone()
        }
    }

    /// Sets `κ_SR = κ_RU = kappa`.
    pub fn with_kappa(&self, kappa: T) -> Self {
        Self {
            kappa_sr: kappa,
            kappa_ru: kappa,
            ..self.clone()
        }
    }

    /// Places the relay at `d_sr` and every user at `1 - d_sr` from it.
    pub fn with_relay_position(&self, d_sr: T) -> Self {
        Self {
            d_sr,
            d_ru: vec![T::one() - d_sr; self.num_users()],
            ..self.clone()
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.cee_var_sr == T::zero() && self.cee_var_ru == T::zero()
    }

    /// True when every user sees the same fading law, as the order-statistic
    /// expressions assume.
    pub fn users_identical(&self) -> bool {
        let d0 = self.d_ru[0];
        let same_distance = self.d_ru.iter().all(|&d| d == d0);
        let same_shape = match &self.m_ru_users {
            Some(v) => v.iter().all(|&m| m == v[0]),
            None => true,
        };
        same_distance && same_shape
    }

    /// Lists every violated invariant. Empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let l = self.num_users();
        if l == 0 {
            v.push("at least one user is required".to_string());
            return v;
        }
        if self.thresholds.len() != l {
            v.push(format!("thresholds has {} entries, expected {l}", self.thresholds.len()));
        }
        if self.d_ru.len() != l {
            v.push(format!("d_ru has {} entries, expected {l}", self.d_ru.len()));
        }
        if let Some(m) = &self.m_ru_users {
            if m.len() != l {
                v.push(format!("m_ru_users has {} entries, expected {l}", m.len()));
            }
            if m.iter().any(|&x| x == 0) {
                v.push("m_ru_users entries must be positive integers".to_string());
            }
        }
        for (name, n) in [
            ("tx_antennas", self.tx_antennas),
            ("rx_antennas", self.rx_antennas),
            ("m_sr", self.m_sr),
            ("m_ru", self.m_ru),
            ("m_li", self.m_li),
        ] {
            if n == 0 {
                v.push(format!("{name} must be a positive integer"));
            }
        }
        let positive = [
            ("path_loss_exponent", self.path_loss_exponent),
            ("d_sr", self.d_sr),
            ("li_scale", self.li_scale),
        ];
        for (name, x) in positive {
            if !(x > T::zero()) || !x.is_finite() {
                v.push(format!("{name} must be positive and finite, got {x}"));
            }
        }
        if self.d_ru.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
            v.push("d_ru entries must be positive and finite".to_string());
        }
        if !(self.li_quality >= T::zero() && self.li_quality <= T::one()) {
            v.push(format!("li_quality must lie in [0, 1], got {}", self.li_quality));
        }
        for (name, x) in [
            ("kappa_sr", self.kappa_sr),
            ("kappa_ru", self.kappa_ru),
            ("cee_var_sr", self.cee_var_sr),
            ("cee_var_ru", self.cee_var_ru),
        ] {
            if !(x >= T::zero()) || !x.is_finite() {
                v.push(format!("{name} must be non-negative and finite, got {x}"));
            }
        }
        if !(self.ipsic_var >= T::zero() && self.ipsic_var <= T::one()) {
            v.push(format!("ipsic_var must lie in [0, 1], got {}", self.ipsic_var));
        }
        if !self.snr_db.is_finite() {
            v.push("snr_db must be finite".to_string());
        }

        if self.power_coeffs.iter().any(|&a| !(a > T::zero())) {
            v.push("power coefficients must be positive".to_string());
        }
        let total: T = self.power_coeffs.iter().copied().sum();
        let tol = T::lit(1e-12).max(T::lit(16.0) * T::epsilon());
        if (total - T::one()).abs() > tol {
            v.push(format!("power coefficients sum to {total}, expected 1"));
        }
        if self.power_coeffs.windows(2).any(|w| !(w[0] > w[1])) {
            v.push("power coefficients must be strictly decreasing (a_1 > a_2 > ...)".to_string());
        }
        if self.thresholds.iter().any(|&t| !(t > T::zero()) || !t.is_finite()) {
            v.push("thresholds must be positive and finite".to_string());
        }

        if self.d_sr > T::zero() && self.path_loss_exponent > T::zero() {
            let omega_sr = self.d_sr.powf(-self.path_loss_exponent);
            if self.cee_var_sr >= omega_sr {
                v.push(format!(
                    "cee_var_sr {} must be below the S-R link power {omega_sr}",
                    self.cee_var_sr
                ));
            }
            for (i, &d) in self.d_ru.iter().enumerate() {
                if d > T::zero() {
                    let omega = d.powf(-self.path_loss_exponent);
                    if self.cee_var_ru >= omega {
                        v.push(format!(
                            "cee_var_ru {} must be below the R-U{} link power {omega}",
                            self.cee_var_ru,
                            i + 1
                        ));
                    }
                }
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn check_user(&self, user: usize) -> Result<()> {
        if user == 0 || user > self.num_users() {
            Err(Error::User {
                user,
                users: self.num_users(),
            })
        } else {
            Ok(())
        }
    }
}

/// Quantities shared by the analytic and simulation engines, evaluated once
/// per configuration (and therefore per SNR point).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants<T> {
    /// Linear average SNR `γ̄`.
    pub snr: T,
    pub omega_sr: T,
    pub omega_sr_est: T,
    pub omega_ru: Vec<T>,
    pub omega_ru_est: Vec<T>,
    pub omega_li: T,
    /// `ϑ1 = κ²_SR + κ²_RU (1 + κ²_SR)`: aggregate distortion-to-signal ratio.
    pub distortion: T,
    /// `ϑ2 = γ̄ σ²_e,l + 1/(1 + κ²_RU)`.
    pub hop2_noise: T,
    /// `ϑ3 = (1 + κ²_RU)(1 + κ²_SR)`.
    pub impairment_product: T,
    /// `ϑ4 = 1/(1 + κ²_SR)`.
    pub li_weight: T,
    /// `ϑ5 = γ̄ σ²_e,SR + 1/(1 + κ²_SR)`.
    pub hop1_noise: T,
    /// Inter-user interference `ξ_j = Σ_{k>j} a_k`.
    pub iui: Vec<T>,
    /// Residual SIC interference `ξ̃_j = σ²_ipsic Σ_{p<j} a_p`.
    pub ipsic: Vec<T>,
    /// `δ_j`, or `None` when stage `j` can never be decoded.
    pub delta: Vec<Option<T>>,
    pub power_coeffs: Vec<T>,
    pub thresholds: Vec<T>,
    /// `‖ĥ_SR‖²` law: shape `m_SR N_S`, mean `N_S Ω̂_SR`.
    pub sr_law: GammaLaw<T>,
    /// `‖ĥ_l‖²` law per user: shape `m_l N_D`, mean `N_D Ω̂_l`.
    pub ru_laws: Vec<GammaLaw<T>>,
    /// `|h_LI|²` law: shape `m_LI`, mean `Ω_LI`.
    pub li_law: GammaLaw<T>,
    pub m_sr: usize,
    pub m_ru: Vec<usize>,
    pub m_li: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Raw impairment levels, needed by the high-SNR expressions.
    pub kappa_sr: T,
    pub kappa_ru: T,
    pub li_quality: T,
    pub li_scale: T,
}

impl<T: Real> DerivedConstants<T> {
    pub fn num_users(&self) -> usize {
        self.power_coeffs.len()
    }

    /// Whether stage `j` (1-based) satisfies `a_j > γ_th,j (ξ_j + ξ̃_j + ϑ1)`.
    pub fn stage_feasible(&self, stage: usize) -> bool {
        self.delta[stage - 1].is_some()
    }

    /// Per-stage feasibility for every `j ≤ user`.
    pub fn feasibility(&self, user: usize) -> Vec<bool> {
        (1..=user).map(|j| self.stage_feasible(j)).collect()
    }

    pub fn is_feasible(&self, user: usize) -> bool {
        (1..=user).all(|j| self.stage_feasible(j))
    }

    /// `δ†_l = max_{j ≤ l} δ_j`, or `None` if any stage is infeasible.
    pub fn delta_max(&self, user: usize) -> Option<T> {
        self.delta[..user]
            .iter()
            .try_fold(T::zero(), |acc, d| d.map(|d| acc.max(d)))
    }

    /// Replaces the two noise terms, keeping everything else. Used by the
    /// high-SNR channel-estimation-error floor.
    pub fn with_noise_terms(&self, hop2_noise: T, hop1_noise: T) -> Self {
        Self {
            hop2_noise,
            hop1_noise,
            ..self.clone()
        }
    }
}

/// Computes every derived symbol for `cfg`, rejecting invalid configurations.
pub fn derive_constants<T: Real>(cfg: &SystemConfig<T>) -> Result<DerivedConstants<T>> {
    cfg.validate()?;
    let one = T::one();
    let snr = cfg.snr_linear();
    let l = cfg.num_users();

    let omega_sr = cfg.d_sr.powf(-cfg.path_loss_exponent);
    let omega_sr_est = omega_sr - cfg.cee_var_sr;
    let omega_ru: Vec<T> = cfg.d_ru.iter().map(|d| d.powf(-cfg.path_loss_exponent)).collect();
    let omega_ru_est: Vec<T> = omega_ru.iter().map(|&o| o - cfg.cee_var_ru).collect();
    let omega_li = cfg.li_scale * snr.powf(cfg.li_quality - one);

    let k_sr = cfg.kappa_sr * cfg.kappa_sr;
    let k_ru = cfg.kappa_ru * cfg.kappa_ru;
    let distortion = k_sr + k_ru * (one + k_sr);
    let hop2_noise = snr * cfg.cee_var_ru + one / (one + k_ru);
    let impairment_product = (one + k_ru) * (one + k_sr);
    let li_weight = one / (one + k_sr);
    let hop1_noise = snr * cfg.cee_var_sr + one / (one + k_sr);

    let a = &cfg.power_coeffs;
    let iui: Vec<T> = (0..l)
        .map(|j| a[j + 1..].iter().fold(T::zero(), |acc, &x| acc + x))
        .collect();
    let ipsic: Vec<T> = (0..l)
        .map(|j| a[..j].iter().fold(T::zero(), |acc, &x| acc + x) * cfg.ipsic_var)
        .collect();
    let delta = (0..l)
        .map(|j| {
            let margin = a[j] - cfg.thresholds[j] * (iui[j] + ipsic[j] + distortion);
            (margin > T::zero()).then(|| cfg.thresholds[j] / (snr * margin))
        })
        .collect();

    let m_ru: Vec<usize> = (1..=l).map(|u| cfg.m_user(u)).collect();
    let ru_laws = (0..l)
        .map(|j| GammaLaw::new(m_ru[j] * cfg.rx_antennas, T::count(m_ru[j]) / omega_ru_est[j]))
        .collect();

    Ok(DerivedConstants {
        snr,
        omega_sr,
        omega_sr_est,
        omega_ru,
        omega_ru_est,
        omega_li,
        distortion,
        hop2_noise,
        impairment_product,
        li_weight,
        hop1_noise,
        iui,
        ipsic,
        delta,
        power_coeffs: a.clone(),
        thresholds: cfg.thresholds.clone(),
        sr_law: GammaLaw::new(cfg.m_sr * cfg.tx_antennas, T::count(cfg.m_sr) / omega_sr_est),
        ru_laws,
        li_law: GammaLaw::new(cfg.m_li, T::count(cfg.m_li) / omega_li),
        m_sr: cfg.m_sr,
        m_ru,
        m_li: cfg.m_li,
        tx_antennas: cfg.tx_antennas,
        rx_antennas: cfg.rx_antennas,
        kappa_sr: cfg.kappa_sr,
        kappa_ru: cfg.kappa_ru,
        li_quality: cfg.li_quality,
        li_scale: cfg.li_scale,
    })
}

/// Per-stage feasibility for user `user` (1-based): entry `j-1` is true iff
/// `a_j > γ_th,j (ξ_j + ξ̃_j + ϑ1)`.
pub fn feasibility<T: Real>(cfg: &SystemConfig<T>, user: usize) -> Result<Vec<bool>> {
    cfg.check_user(user)?;
    Ok(derive_constants(cfg)?.feasibility(user))
}

/// Either a single value shared by every user or one value per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerUser<V> {
    Shared(V),
    Each(Vec<V>),
}

impl<V: Clone> PerUser<V> {
    fn expand(&self, users: usize) -> Vec<V> {
        match self {
            PerUser::Shared(v) => vec![v.clone(); users],
            PerUser::Each(v) => v.clone(),
        }
    }
}

/// On-disk configuration: a flat TOML table with SNR in decibels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub num_users: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub m_sr: usize,
    pub m_ru: usize,
    pub m_li: usize,
    pub path_loss_exponent: f64,
    pub d_sr: f64,
    pub d_ru: PerUser<f64>,
    pub li_quality: f64,
    pub li_scale: f64,
    pub power_coeffs: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub kappa_sr: f64,
    pub kappa_ru: f64,
    pub cee_var_sr: f64,
    pub cee_var_ru: f64,
    pub ipsic_var: f64,
    pub snr_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_ru_users: Option<Vec<usize>>,
    /// Half-duplex thresholds for the baseline comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hd_thresholds: Option<Vec<f64>>,
    /// Single-user threshold for the OMA baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oma_threshold: Option<f64>,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Converts to a validated [`SystemConfig`].
    pub fn to_config<T: Real>(&self) -> Result<SystemConfig<T>> {
        let mut issues = Vec::new();
        if self.power_coeffs.len() != self.num_users {
            issues.push(format!(
                "num_users = {} but power_coeffs has {} entries",
                self.num_users,
                self.power_coeffs.len()
            ));
        }
        if self.thresholds.len() != self.num_users {
            issues.push(format!(
                "num_users = {} but thresholds has {} entries",
                self.num_users,
                self.thresholds.len()
            ));
        }
        if let Some(hd) = &self.hd_thresholds {
            if hd.len() != self.num_users {
                issues.push(format!("hd_thresholds has {} entries, expected {}", hd.len(), self.num_users));
            }
        }
        let cfg = self.to_config_unchecked();
        issues.extend(cfg.violations());
        if issues.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Conversion without validation, for reporting on broken files.
    pub fn to_config_unchecked<T: Real>(&self) -> SystemConfig<T> {
        let f = |x: f64| T::lit(x);
        SystemConfig {
            tx_antennas: self.tx_antennas,
            rx_antennas: self.rx_antennas,
            m_sr: self.m_sr,
            m_ru: self.m_ru,
            m_li: self.m_li,
            m_ru_users: self.m_ru_users.clone(),
            path_loss_exponent: f(self.path_loss_exponent),
            d_sr: f(self.d_sr),
            d_ru: self.d_ru.expand(self.num_users).into_iter().map(f).collect(),
            li_quality: f(self.li_quality),
            li_scale: f(self.li_scale),
            power_coeffs: self.power_coeffs.iter().copied().map(f).collect(),
            thresholds: self.thresholds.iter().copied().map(f).collect(),
            kappa_sr: f(self.kappa_sr),
            kappa_ru: f(self.kappa_ru),
            cee_var_sr: f(self.cee_var_sr),
            cee_var_ru: f(self.cee_var_ru),
            ipsic_var: f(self.ipsic_var),
            snr_db: f(self.snr_db),
        }
    }

    pub fn from_config(cfg: &SystemConfig<f64>) -> Self {
        Self {
            num_users: cfg.num_users(),
            tx_antennas: cfg.tx_antennas,
            rx_antennas: cfg.rx_antennas,
            m_sr: cfg.m_sr,
            m_ru: cfg.m_ru,
            m_li: cfg.m_li,
            path_loss_exponent: cfg.path_loss_exponent,
            d_sr: cfg.d_sr,
            d_ru: PerUser::Each(cfg.d_ru.clone()),
            li_quality: cfg.li_quality,
            li_scale: cfg.li_scale,
            power_coeffs: cfg.power_coeffs.clone(),
            thresholds: cfg.thresholds.clone(),
            kappa_sr: cfg.kappa_sr,
            kappa_ru: cfg.kappa_ru,
            cee_var_sr: cfg.cee_var_sr,
            cee_var_ru: cfg.cee_var_ru,
            ipsic_var: cfg.ipsic_var,
            snr_db: cfg.snr_db,
            m_ru_users: cfg.m_ru_users.clone(),
            hd_thresholds: None,
            oma_threshold: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> SystemConfig<f64> {
        SystemConfig::default()
    }

    #[test]
    fn zero_impairment_identity() {
        let c = derive_constants(&ideal()).unwrap();
        assert_eq!(c.distortion, 0.0);
        assert_eq!(c.hop2_noise, 1.0);
        assert_eq!(c.impairment_product, 1.0);
        assert_eq!(c.li_weight, 1.0);
        assert_eq!(c.hop1_noise, 1.0);
    }

    #[test]
    fn interference_sums() {
        let c = derive_constants(&ideal()).unwrap();
        assert!((c.iui[0] - 0.5).abs() < 1e-15);
        assert!((c.iui[1] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.iui[2], 0.0);
        assert_eq!(c.ipsic, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn distortion_with_kappa_014() {
        let c = derive_constants(&ideal().with_kappa(0.14)).unwrap();
        let expect = 0.0196 + 0.0196 * 1.0196;
        assert!((c.distortion - expect).abs() < 1e-15);
        assert!((c.distortion - 0.039_584_16).abs() < 1e-9);
    }

    #[test]
    fn delta_at_zero_db() {
        let c = derive_constants(&ideal().with_snr_db(0.0)).unwrap();
        assert!((c.delta[0].unwrap() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn link_powers() {
        let c = derive_constants(&ideal().with_snr_db(20.0)).unwrap();
        assert!((c.omega_sr - 8.0).abs() < 1e-12);
        assert!((c.omega_li - 100f64.powf(-0.8)).abs() < 1e-15);
        assert_eq!(c.sr_law.shape, 1);
        assert!((c.sr_law.rate - 0.125).abs() < 1e-15);
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(feasibility(&ideal(), 1).unwrap(), vec![true]);
        assert_eq!(feasibility(&ideal(), 3).unwrap(), vec![true, true, true]);
        let mut cfg = ideal();
        cfg.thresholds[0] = 1.2;
        let c = derive_constants(&cfg).unwrap();
        assert!(!c.is_feasible(1));
        assert_eq!(c.delta_max(3), None);
        assert!(feasibility(&cfg, 4).is_err());
    }

    #[test]
    fn rejects_estimation_error_above_link_power() {
        let mut cfg = ideal();
        cfg.cee_var_sr = 8.0;
        match derive_constants(&cfg) {
            Err(Error::Config(v)) => assert!(v.iter().any(|m| m.contains("cee_var_sr"))),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unnormalised_and_unordered_powers() {
        let mut cfg = ideal();
        cfg.power_coeffs = vec![0.5, 0.5, 0.2];
        let v = cfg.violations();
        assert!(v.iter().any(|m| m.contains("sum to")));
        assert!(v.iter().any(|m| m.contains("strictly decreasing")));
    }

    #[test]
    fn delta_max_is_nondecreasing() {
        let cfg = ideal().with_kappa(0.05);
        let c = derive_constants(&cfg).unwrap();
        let d: Vec<f64> = (1..=3).map(|l| c.delta_max(l).unwrap()).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn toml_round_trip_and_per_user_distance() {
        let text = r#"
            num_users = 3
            tx_antennas = 2
            rx_antennas = 2
            m_sr = 1
            m_ru = 1
            m_li = 1
            path_loss_exponent = 3.0
            d_sr = 0.5
            d_ru = 0.5
            li_quality = 0.2
            li_scale = 1.0
            power_coeffs = [0.5, 0.3333333333333333, 0.16666666666666666]
            thresholds = [0.9, 1.5, 2.0]
            kappa_sr = 0.0
            kappa_ru = 0.0
            cee_var_sr = 0.0
            cee_var_ru = 0.0
            ipsic_var = 0.0
            snr_db = 15.0
        "#;
        let file = ConfigFile::from_toml_str(text).unwrap();
        let cfg: SystemConfig<f64> = file.to_config().unwrap();
        assert_eq!(cfg.d_ru, vec![0.5; 3]);
        let again = ConfigFile::from_toml_str(&file.to_toml_string()).unwrap();
        assert_eq!(again.to_config::<f64>().unwrap(), cfg);
    }

    #[test]
    fn missing_key_is_a_parse_error() {
        let err = ConfigFile::from_toml_str("num_users = 3").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }
}
