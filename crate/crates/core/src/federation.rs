//! Remote engines of a simulated federation.
//!
//! Real federations run heterogeneous engines whose scores are not
//! comparable. A [`ScoreDistortion`] is a strictly increasing map applied to a
//! collection's BM25 scores before they leave the collection, so local rank
//! order is untouched while score scales differ from source to source.

use alloc::collections::BTreeMap;
use alloc::string::String;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::RankedList;
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScoreDistortion {
    #[default]
    Identity,
    /// `scale * s^gamma + offset`
    Power { scale: f64, gamma: f64, offset: f64 },
    /// `scale * ln(1 + s) + offset`
    Log { scale: f64, offset: f64 },
}

impl ScoreDistortion {
    pub fn apply(&self, score: f64) -> f64 {
        let s = score.max(0.0);
        match *self {
            Self::Identity => score,
            Self::Power { scale, gamma, offset } => scale * libm::pow(s, gamma) + offset,
            Self::Log { scale, offset } => scale * libm::log1p(s) + offset,
        }
    }

    /// Applies the map to every score; order and ranks are preserved.
    pub fn distort(&self, list: &RankedList) -> RankedList {
        let mut out = list.clone();
        for e in &mut out.entries {
            e.score = self.apply(e.score);
        }
        out
    }

    /// A random nonlinear map: a power law with exponent in `[1/4, 4]`
    /// (log-uniform) or a scaled logarithm, with a random scale and offset.
    pub fn random(rng: &mut impl Rng) -> Self {
        let scale = libm::exp(rng.random_range(libm::log(0.1)..libm::log(10.0)));
        let offset = rng.random_range(0.0..2.0);
        if rng.random_bool(0.75) {
            let gamma = libm::exp(rng.random_range(libm::log(0.25)..libm::log(4.0)));
            Self::Power { scale, gamma, offset }
        } else {
            Self::Log { scale, offset }
        }
    }
}

/// Which distortion family a simulated federation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistortionMode {
    /// Remote scores are plain BM25.
    #[default]
    None,
    /// Each collection draws a random [`ScoreDistortion::random`] map.
    Random,
}

/// One distortion per collection, each from its own seed stream.
pub fn draw_distortions<'a>(
    codes: impl IntoIterator<Item = &'a str>,
    mode: DistortionMode,
    seed: u64,
) -> BTreeMap<String, ScoreDistortion> {
    codes
        .into_iter()
        .map(|code| {
            let d = match mode {
                DistortionMode::None => ScoreDistortion::Identity,
                DistortionMode::Random => {
                    ScoreDistortion::random(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, &["distortion", code])))
                }
            };
            (code.into(), d)
        })
        .collect()
}
