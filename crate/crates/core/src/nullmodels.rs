//! Baseline selection rules without scoring, iteration or peer influence.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;

use crate::simulation::{select_top, Model, RunReport, TradingLink};
use crate::{metrics, Error, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NullModelKind {
    Random,
    PriceOnly,
    DebtsOnly,
    DebtsDistance,
    PriceDistance,
    RandomDistance,
}

/// Share of all trading links, shortest first, open to the distance-restricted kinds.
pub const SHORT_LINK_SHARE: f64 = 0.25;

impl NullModelKind {
    pub const ALL: [Self; 6] = [
        Self::Random,
        Self::PriceOnly,
        Self::DebtsOnly,
        Self::DebtsDistance,
        Self::PriceDistance,
        Self::RandomDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::PriceOnly => "price_only",
            Self::DebtsOnly => "debts_only",
            Self::DebtsDistance => "debts_distance",
            Self::PriceDistance => "price_distance",
            Self::RandomDistance => "random_distance",
        }
    }

    pub fn distance_restricted(self) -> bool {
        matches!(
            self,
            Self::DebtsDistance | Self::PriceDistance | Self::RandomDistance
        )
    }

    fn key(self, link: &TradingLink) -> f64 {
        match self {
            Self::Random | Self::RandomDistance => 0.0,
            Self::PriceOnly | Self::PriceDistance => link.price,
            Self::DebtsOnly | Self::DebtsDistance => link.debts,
        }
    }
}

impl fmt::Display for NullModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NullModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownNullModel(s.to_string()))
    }
}

/// Links whose length is within the shortest [`SHORT_LINK_SHARE`] of all
/// links; a seller with none of those keeps its shortest link(s).
pub fn allowed_short_links(links: &[TradingLink], m: usize) -> Vec<bool> {
    if links.is_empty() {
        return Vec::new();
    }
    let mut lengths: Vec<f64> = links.iter().map(|l| l.length).collect();
    lengths.sort_by(f64::total_cmp);
    let k = (libm::ceil(SHORT_LINK_SHARE * lengths.len() as f64) as usize).max(1);
    let threshold = lengths[k - 1];
    let mut allowed: Vec<bool> = links.iter().map(|l| l.length <= threshold).collect();
    for (chunk, flags) in links.chunks(m).zip(allowed.chunks_mut(m)) {
        if !flags.iter().any(|&a| a) {
            let shortest = chunk.iter().map(|l| l.length).fold(f64::INFINITY, f64::min);
            for (l, f) in chunk.iter().zip(flags.iter_mut()) {
                *f = l.length == shortest;
            }
        }
    }
    allowed
}

/// Selects each seller's `n_buyer` links by the rule of `kind`, ties drawn
/// from a generator seeded with `seed` in seller-id order.
pub fn run_null(model: &Model, kind: NullModelKind, seed: u64) -> RunReport {
    let m = model.buyer_ids().len();
    let mut links = model.static_links().to_vec();
    let allowed = if kind.distance_restricted() {
        allowed_short_links(&links, m)
    } else {
        alloc::vec![true; links.len()]
    };
    let mut rng = SimRng::seed_from_u64(seed);
    let mut candidates = Vec::with_capacity(m);
    let mut keys = Vec::with_capacity(m);
    for (s, chunk) in links.chunks_mut(m).enumerate() {
        candidates.clear();
        candidates.extend((0..m).filter(|&i| allowed[s * m + i]));
        keys.clear();
        keys.extend(candidates.iter().map(|&i| kind.key(&chunk[i])));
        for i in select_top(&keys, model.n_buyer()[s], &mut rng) {
            chunk[candidates[i]].status_model = true;
        }
    }
    let observation = metrics::observe(&model.agent_ids(), &links);
    RunReport {
        seed,
        iterations_used: 0,
        converged: true,
        cycle_detected: false,
        observation,
        active_links: links
            .iter()
            .filter(|l| l.status_model)
            .map(TradingLink::key)
            .collect(),
    }
}
