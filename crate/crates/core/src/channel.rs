//! Random generation of one network realisation.
//!
//! Squared MRT/MRC channel norms are drawn directly as Gamma variates: with an
//! integer Nakagami shape the norm of `N` i.i.d. branches is Gamma with shape
//! `m N`, so summing per-antenna terms would give the same law at a higher
//! cost. Channel-estimation errors enter only through the reduced mean `Ω̂`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::params::DerivedConstants;
use crate::real::Real;
use crate::specfun::GammaLaw;

/// Generator type behind every simulation stream.
pub type StreamRng = ChaCha8Rng;

/// Independent, reproducible stream `stream` of the generator seeded by `seed`.
///
/// Streams with the same seed but different indices do not overlap.
pub fn seeded_stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One realisation of the three effective channel gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw<T> {
    /// `ψ1 = ‖ĥ_SR‖²`.
    pub sr_gain: T,
    /// `ψ2` for every user, sorted ascending; entry `l-1` belongs to user `l`.
    pub ru_gains: Vec<T>,
    /// `ψ3 = |h_LI|²`.
    pub li_gain: T,
}

impl<T: Real> ChannelDraw<T> {
    pub fn new(sr_gain: T, mut ru_gains: Vec<T>, li_gain: T) -> Self {
        ru_gains.sort_by(|a, b| a.partial_cmp(b).expect("finite channel gains"));
        Self {
            sr_gain,
            ru_gains,
            li_gain,
        }
    }

    /// Ordered relay-to-user gain of user `user` (1-based).
    pub fn ru_gain(&self, user: usize) -> T {
        self.ru_gains[user - 1]
    }
}

fn gamma_of<T: Real>(law: &GammaLaw<T>) -> Gamma<f64> {
    Gamma::new(law.shape as f64, law.scale().to_f64_lossy()).expect("valid gamma parameters")
}

/// Reusable sampler for one set of derived constants.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    sr: Gamma<f64>,
    ru: Vec<Gamma<f64>>,
    li: Gamma<f64>,
    li_enabled: bool,
}

impl ChannelSampler {
    pub fn new<T: Real>(constants: &DerivedConstants<T>) -> Self {
        Self {
            sr: gamma_of(&constants.sr_law),
            ru: constants.ru_laws.iter().map(gamma_of).collect(),
            li: gamma_of(&constants.li_law),
            li_enabled: true,
        }
    }

    /// Variant with the loop-interference gain pinned to zero. The LI variate
    /// is still consumed so that streams stay aligned with the full-duplex
    /// sampler.
    pub fn without_loop_interference(mut self) -> Self {
        self.li_enabled = false;
        self
    }

    pub fn num_users(&self) -> usize {
        self.ru.len()
    }

    /// Overwrites `out` with a fresh realisation.
    pub fn draw_into<T: Real, R: Rng + ?Sized>(&self, rng: &mut R, out: &mut ChannelDraw<T>) {
        out.sr_gain = T::lit(self.sr.sample(rng));
        out.ru_gains.clear();
        for g in &self.ru {
            out.ru_gains.push(T::lit(g.sample(rng)));
        }
        out.ru_gains
            .sort_by(|a, b| a.partial_cmp(b).expect("finite channel gains"));
        let li = self.li.sample(rng);
        out.li_gain = if self.li_enabled { T::lit(li) } else { T::zero() };
    }

    pub fn draw<T: Real, R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelDraw<T> {
        let mut out = ChannelDraw {
            sr_gain: T::zero(),
            ru_gains: Vec::with_capacity(self.ru.len()),
            li_gain: T::zero(),
        };
        self.draw_into(rng, &mut out);
        out
    }
}

/// Draws one realisation for `constants`.
pub fn draw<T: Real, R: Rng + ?Sized>(constants: &DerivedConstants<T>, rng: &mut R) -> ChannelDraw<T> {
    ChannelSampler::new(constants).draw(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_constants, SystemConfig};

    #[test]
    fn same_stream_is_bit_identical() {
        let c = derive_constants(&SystemConfig::<f64>::default()).unwrap();
        let s = ChannelSampler::new(&c);
        let mut a = seeded_stream(7, 3);
        let mut b = seeded_stream(7, 3);
        for _ in 0..100 {
            assert_eq!(s.draw::<f64, _>(&mut a), s.draw::<f64, _>(&mut b));
        }
    }

    #[test]
    fn different_seeds_differ() {
        let c = derive_constants(&SystemConfig::<f64>::default()).unwrap();
        let s = ChannelSampler::new(&c);
        let a: ChannelDraw<f64> = s.draw(&mut seeded_stream(1, 0));
        let b: ChannelDraw<f64> = s.draw(&mut seeded_stream(2, 0));
        assert_ne!(a.sr_gain, b.sr_gain);
    }

    #[test]
    fn user_gains_are_sorted_and_non_negative() {
        let c = derive_constants(&SystemConfig::<f64>::default()).unwrap();
        let s = ChannelSampler::new(&c);
        let mut rng = seeded_stream(11, 0);
        for _ in 0..1000 {
            let d: ChannelDraw<f64> = s.draw(&mut rng);
            assert!(d.ru_gains.windows(2).all(|w| w[0] <= w[1]));
            assert!(d.sr_gain >= 0.0 && d.li_gain >= 0.0);
            assert!(d.ru_gains.iter().all(|g| g.is_finite() && *g >= 0.0));
        }
    }

    #[test]
    fn half_duplex_sampler_zeroes_li_but_keeps_alignment() {
        let c = derive_constants(&SystemConfig::<f64>::default()).unwrap();
        let fd = ChannelSampler::new(&c);
        let hd = fd.clone().without_loop_interference();
        let mut a = seeded_stream(5, 0);
        let mut b = seeded_stream(5, 0);
        for _ in 0..10 {
            let x: ChannelDraw<f64> = fd.draw(&mut a);
            let y: ChannelDraw<f64> = hd.draw(&mut b);
            assert_eq!(x.sr_gain, y.sr_gain);
            assert_eq!(x.ru_gains, y.ru_gains);
            assert_eq!(y.li_gain, 0.0);
        }
    }
}
