//! Monte Carlo outage estimation.
//!
//! Trials are cut into fixed blocks of [`BLOCK_TRIALS`]; block `b` always
//! draws from stream `b` of the seeded generator. Partitions only decide which
//! worker runs which block, and per-block integer counts are summed, so the
//! result depends on `(seed, trials)` alone and never on scheduling.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{seeded_stream, ChannelDraw, ChannelSampler, StreamRng};
use crate::error::{Error, Result};
use crate::params::{derive_constants, DerivedConstants, SystemConfig};
use crate::real::Real;
use crate::sidnr::outage_indicator;

/// Trials per random stream.
pub const BLOCK_TRIALS: u64 = 1 << 16;

/// How an outage probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Mc,
    Exact,
    LowerBound,
    Asymptotic,
    Oracle,
    Hd,
    Oma,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Mc,
        Method::Exact,
        Method::LowerBound,
        Method::Asymptotic,
        Method::Oracle,
        Method::Hd,
        Method::Oma,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Exact => "exact",
            Method::LowerBound => "lb",
            Method::Asymptotic => "asymp",
            Method::Oracle => "oracle",
            Method::Hd => "hd",
            Method::Oma => "oma",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag)
    }

    /// Whether the method is stochastic and reports a standard error.
    pub fn is_simulated(self) -> bool {
        matches!(self, Method::Mc | Method::Hd | Method::Oma)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Per-user outage probability with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate<T> {
    pub op_value: T,
    /// Trials behind a simulated value; zero for deterministic methods.
    pub trials: u64,
    pub outages: u64,
    /// `sqrt(p (1 - p) / trials)`; zero for deterministic methods.
    pub std_error: T,
    pub method: Method,
    pub user: usize,
    pub seed: Option<u64>,
    pub partitions: Option<usize>,
}

impl<T: Real> OutageEstimate<T> {
    /// Estimate from an integer outage count.
    pub fn from_counts(method: Method, user: usize, outages: u64, trials: u64, seed: u64, partitions: usize) -> Self {
        let p = outages as f64 / trials as f64;
        Self {
            op_value: T::lit(p),
            trials,
            outages,
            std_error: T::lit((p * (1.0 - p) / trials as f64).sqrt()),
            method,
            user,
            seed: Some(seed),
            partitions: Some(partitions),
        }
    }

    /// A value that carries no sampling error.
    pub fn deterministic(method: Method, user: usize, op_value: T) -> Self {
        Self {
            op_value,
            trials: 0,
            outages: 0,
            std_error: T::zero(),
            method,
            user,
            seed: None,
            partitions: None,
        }
    }

    /// `|self - value|` in standard errors. When every trial agreed (zero
    /// empirical spread) the spread implied by `value` itself is used.
    pub fn z_score(&self, value: T) -> T {
        let diff = (self.op_value - value).abs();
        if diff == T::zero() {
            return T::zero();
        }
        let sigma = if self.std_error > T::zero() || self.trials == 0 {
            self.std_error
        } else {
            (value * (T::one() - value) / T::lit(self.trials as f64)).sqrt()
        };
        diff / sigma
    }
}

fn check_run(trials: u64, partitions: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    if partitions == 0 {
        return Err(Error::Argument("partitions must be at least 1".into()));
    }
    Ok(())
}

/// Runs `trials` trials and returns `slots` integer counters summed over all
/// blocks. `kernel(rng, n, counts)` must run `n` trials on `rng` and add its
/// counts into `counts`.
pub fn run_blocks<K>(trials: u64, seed: u64, partitions: usize, slots: usize, kernel: K) -> Vec<u64>
where
    K: Fn(&mut StreamRng, u64, &mut [u64]) + Sync,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let workers = (partitions as u64).min(blocks).max(1);
    (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut counts = vec![0u64; slots];
            let mut b = w;
            while b < blocks {
                let start = b * BLOCK_TRIALS;
                let n = BLOCK_TRIALS.min(trials - start);
                let mut rng = seeded_stream(seed, b);
                kernel(&mut rng, n, &mut counts);
                b += workers;
            }
            counts
        })
        .reduce(
            || vec![0u64; slots],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Outage counts for every user from shared draws.
pub(crate) fn count_all_users<T: Real>(
    c: &DerivedConstants<T>,
    sampler: &ChannelSampler,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Vec<u64> {
    let users = c.num_users();
    run_blocks(trials, seed, partitions, users, |rng, n, counts| {
        simulate_block(c, sampler, rng, n, counts)
    })
}

fn simulate_block<T: Real, R: Rng>(c: &DerivedConstants<T>, sampler: &ChannelSampler, rng: &mut R, n: u64, counts: &mut [u64]) {
    let users = c.num_users();
    let mut draw = ChannelDraw {
        sr_gain: T::zero(),
        ru_gains: Vec::with_capacity(users),
        li_gain: T::zero(),
    };
    for _ in 0..n {
        sampler.draw_into(rng, &mut draw);
        for (l, slot) in counts.iter_mut().enumerate() {
            if outage_indicator(&draw, c, l + 1) {
                *slot += 1;
            }
        }
    }
}

fn infeasible<T: Real>(method: Method, user: usize, trials: u64, seed: u64, partitions: usize) -> OutageEstimate<T> {
    OutageEstimate::from_counts(method, user, trials, trials, seed, partitions)
}

/// Simulated outage probability of user `user`.
pub fn estimate<T: Real>(
    cfg: &SystemConfig<T>,
    user: usize,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<OutageEstimate<T>> {
    cfg.check_user(user)?;
    let all = estimate_all_users(cfg, trials, seed, partitions)?;
    Ok(all[user - 1])
}

/// Simulated outage probability of every user from the same draws.
pub fn estimate_all_users<T: Real>(
    cfg: &SystemConfig<T>,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<Vec<OutageEstimate<T>>> {
    check_run(trials, partitions)?;
    let c = derive_constants(cfg)?;
    let sampler = ChannelSampler::new(&c);
    Ok(estimates_from(&c, &sampler, Method::Mc, trials, seed, partitions))
}

pub(crate) fn estimates_from<T: Real>(
    c: &DerivedConstants<T>,
    sampler: &ChannelSampler,
    method: Method,
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Vec<OutageEstimate<T>> {
    let users = c.num_users();
    if (1..=users).all(|l| !c.is_feasible(l)) {
        return (1..=users)
            .map(|l| infeasible(method, l, trials, seed, partitions))
            .collect();
    }
    let counts = count_all_users(c, sampler, trials, seed, partitions);
    counts
        .into_iter()
        .enumerate()
        .map(|(i, k)| OutageEstimate::from_counts(method, i + 1, k, trials, seed, partitions))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_user_is_certain() {
        let mut cfg = SystemConfig::<f64>::default();
        cfg.thresholds[0] = 1.2;
        let e = estimate(&cfg, 1, 1000, 1, 2).unwrap();
        assert_eq!(e.op_value, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = SystemConfig::<f64>::default();
        assert!(estimate_all_users(&cfg, 0, 1, 1).is_err());
        assert!(estimate_all_users(&cfg, 10, 1, 0).is_err());
    }

    #[test]
    fn partition_count_does_not_change_counts() {
        let cfg = SystemConfig::<f64>::default();
        let trials = 3 * BLOCK_TRIALS + 123;
        let base = estimate_all_users(&cfg, trials, 42, 1).unwrap();
        for p in [2, 4, 16] {
            let other = estimate_all_users(&cfg, trials, 42, p).unwrap();
            for (a, b) in base.iter().zip(&other) {
                assert_eq!(a.outages, b.outages);
            }
        }
    }

    #[test]
    fn standard_error_matches_formula() {
        let e: OutageEstimate<f64> = OutageEstimate::from_counts(Method::Mc, 1, 250, 1000, 0, 1);
        assert!((e.std_error - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn z_score_with_unanimous_trials() {
        let e: OutageEstimate<f64> = OutageEstimate::from_counts(Method::Mc, 1, 1000, 1000, 0, 1);
        assert_eq!(e.std_error, 0.0);
        assert!(e.z_score(1.0 - 1e-16) < 1e-3);
        assert!(e.z_score(0.5) > 10.0);
    }

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_tag(m.tag()), Some(m));
        }
        assert_eq!(Method::from_tag("nope"), None);
    }
}
