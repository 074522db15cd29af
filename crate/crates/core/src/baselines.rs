//! Half-duplex NOMA and full-duplex OMA reference systems, simulated on the
//! same channel streams as the full-duplex NOMA network.

use crate::channel::ChannelSampler;
use crate::error::{Error, Result};
use crate::montecarlo::{estimates_from, run_blocks, Method, OutageEstimate};
use crate::params::{derive_constants, SystemConfig};
use crate::real::Real;
use crate::sidnr::sidnr_raw;

/// `γ^HD = (1 + γ^FD)² - 1`: equal rate when the half-duplex link needs two slots.
pub fn hd_threshold_from_fd<T: Real>(fd: T) -> T {
    (T::one() + fd) * (T::one() + fd) - T::one()
}

/// Inverse of [`hd_threshold_from_fd`].
pub fn fd_threshold_from_hd<T: Real>(hd: T) -> T {
    (T::one() + hd).sqrt() - T::one()
}

/// `γ^OMA = Π (1 + γ_l) - 1`: the OMA user carries the sum rate alone.
pub fn oma_threshold<T: Real>(thresholds: &[T]) -> T {
    thresholds.iter().fold(T::one(), |acc, &g| acc * (T::one() + g)) - T::one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    HdNoma,
    FdOma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig<T> {
    pub base: SystemConfig<T>,
    pub mode: BaselineMode,
    pub hd_thresholds: Vec<T>,
    pub oma_threshold: T,
}

impl<T: Real> BaselineConfig<T> {
    /// Half-duplex NOMA. Without explicit thresholds the equal-rate mapping
    /// of the full-duplex thresholds is used.
    pub fn hd_noma(base: SystemConfig<T>, hd_thresholds: Option<Vec<T>>) -> Result<Self> {
        let hd = hd_thresholds.unwrap_or_else(|| base.thresholds.iter().map(|&g| hd_threshold_from_fd(g)).collect());
        if hd.len() != base.num_users() {
            return Err(Error::Config(vec![format!(
                "{} half-duplex thresholds for {} users",
                hd.len(),
                base.num_users()
            )]));
        }
        if hd.iter().any(|g| !(*g > T::zero()) || !g.is_finite()) {
            return Err(Error::Config(vec!["half-duplex thresholds must be positive".into()]));
        }
        let oma = oma_threshold(&base.thresholds);
        Ok(Self {
            base,
            mode: BaselineMode::HdNoma,
            hd_thresholds: hd,
            oma_threshold: oma,
        })
    }

    /// Full-duplex OMA. Without an explicit threshold the sum-rate mapping
    /// of the NOMA thresholds is used.
    pub fn fd_oma(base: SystemConfig<T>, threshold: Option<T>) -> Result<Self> {
        let oma = threshold.unwrap_or_else(|| oma_threshold(&base.thresholds));
        if !(oma > T::zero()) || !oma.is_finite() {
            return Err(Error::Config(vec!["OMA threshold must be positive".into()]));
        }
        let hd = base.thresholds.clone();
        Ok(Self {
            base,
            mode: BaselineMode::FdOma,
            hd_thresholds: hd,
            oma_threshold: oma,
        })
    }
}

fn check_run(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::Argument("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Half-duplex NOMA outage of every user: no loop interference, half-duplex
/// thresholds, otherwise the same system.
pub fn hd_outage_all<T: Real>(
    bcfg: &BaselineConfig<T>,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<Vec<OutageEstimate<T>>> {
    check_run(trials)?;
    let cfg = SystemConfig {
        thresholds: bcfg.hd_thresholds.clone(),
        ..bcfg.base.clone()
    };
    let c = derive_constants(&cfg)?;
    let sampler = ChannelSampler::new(&c).without_loop_interference();
    Ok(estimates_from(&c, &sampler, Method::Hd, trials, seed, partitions.max(1)))
}

pub fn hd_outage<T: Real>(bcfg: &BaselineConfig<T>, user: usize, trials: u64, seed: u64) -> Result<OutageEstimate<T>> {
    bcfg.base.check_user(user)?;
    Ok(hd_outage_all(bcfg, trials, seed, 1)?[user - 1])
}

/// Full-duplex OMA outage of every user: each user is served alone with the
/// whole power and the OMA threshold, keeping its ordered channel.
pub fn oma_outage_all<T: Real>(
    bcfg: &BaselineConfig<T>,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<Vec<OutageEstimate<T>>> {
    check_run(trials)?;
    let partitions = partitions.max(1);
    let c = derive_constants(&bcfg.base)?;
    let users = c.num_users();
    let threshold = bcfg.oma_threshold;
    if T::one() <= threshold * c.distortion {
        return Ok((1..=users)
            .map(|l| OutageEstimate::from_counts(Method::Oma, l, trials, trials, seed, partitions))
            .collect());
    }
    let sampler = ChannelSampler::new(&c);
    let counts = run_blocks(trials, seed, partitions, users, |rng, n, counts| {
        let mut draw = crate::channel::ChannelDraw {
            sr_gain: T::zero(),
            ru_gains: Vec::with_capacity(users),
            li_gain: T::zero(),
        };
        for _ in 0..n {
            sampler.draw_into(rng, &mut draw);
            for (l, slot) in counts.iter_mut().enumerate() {
                let g = sidnr_raw(draw.sr_gain, draw.ru_gains[l], draw.li_gain, T::one(), T::zero(), &c);
                if g <= threshold {
                    *slot += 1;
                }
            }
        }
    });
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, k)| OutageEstimate::from_counts(Method::Oma, i + 1, k, trials, seed, partitions))
        .collect())
}

pub fn oma_outage<T: Real>(bcfg: &BaselineConfig<T>, user: usize, trials: u64, seed: u64) -> Result<OutageEstimate<T>> {
    bcfg.base.check_user(user)?;
    Ok(oma_outage_all(bcfg, trials, seed, 1)?[user - 1])
}
