//! Model initialization and the iterative choice loop.
//!
//! [`Model`] holds everything that depends only on the dataset: link
//! lengths, static sub-scores, weight preferences, pairwise social criteria
//! and each seller's number of buyers. [`Model::init`] binds a parameter
//! vector and a seed, producing a [`ModelState`] that is stepped until the
//! active network repeats.
//!
//! One step runs three passes over all sellers:
//! 1. social sub-scores from the influencers' previous scores,
//! 2. final scores into a staging slot, committed once every link is done,
//! 3. top-`n_buyer` selection, cutoff ties drawn from the seeded generator
//!    in seller-id order.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::domain::{AgentId, Dataset, GlobalParams, LinkKey};
use crate::metrics::{self, ObservationRecord};
use crate::par;
use crate::scoring::{
    compute_preferences, normalize_in_place, social_criteria, social_link_score, EffectiveWeights,
    Preferences, SocialCriteria, SubScores,
};
use crate::socialnet::{select_active, survives, SocialLink};
use crate::{Error, Result, SimRng};

/// Source of each seller's number of buyers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NBuyerMode {
    /// Observed count of empirical links.
    #[default]
    Empirical,
    /// Predicted from total sales, see [`predict_n_buyer`].
    Regression,
}

/// Population over which price, distance and debts are min-max rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NormalizationScope {
    /// Each seller's outgoing links.
    #[default]
    PerSeller,
    /// All trading links at once.
    Global,
}

/// What an influencer passes on for a buyer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SocialSignal {
    /// The influencer's previous final score for that buyer.
    #[default]
    Scores,
    /// 1 if the influencer's link to that buyer was active, else 0.
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ModelConfig {
    pub n_buyer_mode: NBuyerMode,
    pub normalization: NormalizationScope,
    pub social_signal: SocialSignal,
    pub max_iter: usize,
}

pub const DEFAULT_MAX_ITER: usize = 500;

/// Number of past selections kept for cycle detection.
pub const CYCLE_HISTORY: usize = 8;

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_buyer_mode: NBuyerMode::Empirical,
            normalization: NormalizationScope::PerSeller,
            social_signal: SocialSignal::Scores,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Regression of the number of buyers on log total sales.
pub const N_BUYER_INTERCEPT: f64 = 0.045;
pub const N_BUYER_SLOPE: f64 = 0.065;

/// Predicted number of buyers for a seller with `total_sales`, rounded half
/// up and at least 1.
pub fn predict_n_buyer(total_sales: f64) -> Result<u32> {
    if !(total_sales > 0.0) || !total_sales.is_finite() {
        return Err(Error::NonPositiveSales(total_sales));
    }
    let raw = N_BUYER_INTERCEPT + N_BUYER_SLOPE * libm::log(total_sales);
    Ok((libm::floor(raw + 0.5) as u32).max(1))
}

/// A potential seller→buyer trade.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TradingLink {
    pub seller: AgentId,
    pub buyer: AgentId,
    pub length: f64,
    pub price: f64,
    pub debts: f64,
    pub score_price: f64,
    pub score_dist: f64,
    pub score_debts: f64,
    pub score_social: f64,
    /// Final score of the latest completed iteration (preliminary score
    /// before the first one).
    pub score: f64,
    pub score_next: f64,
    pub status_model: bool,
    pub status_data: bool,
    pub tons: f64,
}

impl TradingLink {
    pub fn subscores(&self) -> SubScores {
        SubScores {
            price: self.score_price,
            dist: self.score_dist,
            debts: self.score_debts,
        }
    }

    pub fn key(&self) -> LinkKey {
        (self.seller, self.buyer)
    }
}

/// Chooses `n` indices with the largest keys. When equal keys straddle the
/// cutoff, the needed number of them is drawn uniformly from `rng`; no draw
/// happens otherwise. Returned indices are ascending.
pub fn select_top<R: Rng + ?Sized>(keys: &[f64], n: usize, rng: &mut R) -> Vec<usize> {
    let n = n.min(keys.len());
    if n == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    let cutoff = keys[order[n - 1]];
    let mut chosen: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&i| keys[i].total_cmp(&cutoff).is_gt())
        .collect();
    let mut tied: Vec<usize> = order
        .iter()
        .copied()
        .skip(chosen.len())
        .take_while(|&i| keys[i].total_cmp(&cutoff).is_eq())
        .collect();
    let need = n - chosen.len();
    if tied.len() > need {
        for i in 0..need {
            let j = rng.random_range(i..tied.len());
            tied.swap(i, j);
        }
        tied.truncate(need);
    }
    chosen.extend(tied);
    chosen.sort_unstable();
    chosen
}

/// Dataset-dependent part of the model, shared by every parameter vector.
#[derive(Debug, Clone)]
pub struct Model {
    config: ModelConfig,
    seller_ids: Vec<AgentId>,
    buyer_ids: Vec<AgentId>,
    /// Seller-major trading links with static fields filled in.
    template: Vec<TradingLink>,
    prefs: Vec<Preferences>,
    /// `criteria[a * n + b]` describes the influence of seller `a` on `b`.
    criteria: Vec<SocialCriteria>,
    n_buyer: Vec<usize>,
}

impl Model {
    pub fn new(dataset: &Dataset, config: ModelConfig) -> Result<Self> {
        let mut sellers: Vec<_> = dataset.sellers.iter().collect();
        let mut buyers: Vec<_> = dataset.buyers.iter().collect();
        sellers.sort_by_key(|s| s.id);
        buyers.sort_by_key(|b| b.id);
        let n = sellers.len();
        let m = buyers.len();
        if n < 2 {
            return Err(Error::TooFewSellers(n));
        }
        if m == 0 {
            return Err(Error::NoBuyers(sellers[0].id));
        }
        if config.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }

        let owned: Vec<_> = sellers.iter().map(|s| (*s).clone()).collect();
        let prefs = compute_preferences(&owned)?;
        let empirical = dataset.empirical_set();

        let mut template = Vec::with_capacity(n * m);
        for s in &sellers {
            for b in &buyers {
                let length = dataset
                    .seller_buyer_distance(s, b)
                    .ok_or(Error::MissingDistance(s.id, b.id))?;
                template.push(TradingLink {
                    seller: s.id,
                    buyer: b.id,
                    length,
                    price: b.price,
                    debts: s.debt_with(b.id),
                    status_data: empirical.contains(&(s.id, b.id)),
                    ..TradingLink::default()
                });
            }
        }
        for l in &dataset.empirical_links {
            if let (Ok(si), Ok(bi)) = (
                sellers.binary_search_by_key(&l.seller, |s| s.id),
                buyers.binary_search_by_key(&l.buyer, |b| b.id),
            ) {
                template[si * m + bi].tons = l.tons;
            }
        }
        fill_static_subscores(&mut template, m, config.normalization);

        let mut criteria = Vec::with_capacity(n * n);
        for a in &sellers {
            for b in &sellers {
                criteria.push(social_criteria(a, b));
            }
        }

        let n_buyer = sellers
            .iter()
            .map(|s| {
                let k = match config.n_buyer_mode {
                    NBuyerMode::Empirical => s.n_buyer_empirical,
                    NBuyerMode::Regression => predict_n_buyer(s.total_sales)?,
                };
                Ok((k as usize).clamp(1, m))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            config,
            seller_ids: sellers.iter().map(|s| s.id).collect(),
            buyer_ids: buyers.iter().map(|b| b.id).collect(),
            template,
            prefs,
            criteria,
            n_buyer,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// Seller ids in the model's (ascending) order.
    pub fn seller_ids(&self) -> &[AgentId] {
        &self.seller_ids
    }

    pub fn buyer_ids(&self) -> &[AgentId] {
        &self.buyer_ids
    }

    /// Sellers followed by buyers.
    pub fn agent_ids(&self) -> Vec<AgentId> {
        self.seller_ids
            .iter()
            .chain(&self.buyer_ids)
            .copied()
            .collect()
    }

    pub fn preferences(&self) -> &[Preferences] {
        &self.prefs
    }

    /// Number of buyers each seller selects, in seller order.
    pub fn n_buyer(&self) -> &[usize] {
        &self.n_buyer
    }

    /// Trading links with static fields and sub-scores, seller-major.
    pub fn static_links(&self) -> &[TradingLink] {
        &self.template
    }

    pub fn empirical_set(&self) -> alloc::collections::BTreeSet<LinkKey> {
        self.template
            .iter()
            .filter(|l| l.status_data)
            .map(TradingLink::key)
            .collect()
    }

    /// Scored, pruned and activated social network for `params`.
    fn social_network(&self, params: &GlobalParams) -> Result<Vec<SocialLink>> {
        let n = self.seller_ids.len();
        if params.social_weight_sum() <= 0.0 {
            return Ok(Vec::new());
        }
        let mut kept = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                let ab = SocialLink {
                    from: a,
                    to: b,
                    score: social_link_score(&self.criteria[a * n + b], params)?,
                    active: false,
                };
                let ba = SocialLink {
                    from: b,
                    to: a,
                    score: social_link_score(&self.criteria[b * n + a], params)?,
                    active: false,
                };
                kept.push(if survives(&ba, &ab, &self.seller_ids) {
                    ba
                } else {
                    ab
                });
            }
        }
        Ok(select_active(&kept, params.n_social, &self.seller_ids))
    }

    /// Binds `params` and `seed`: preliminary scores, social network, no
    /// selection yet.
    pub fn init(&self, params: &GlobalParams, seed: u64) -> Result<ModelState<'_>> {
        params.validate()?;
        let m = self.buyer_ids.len();
        let eff: Vec<EffectiveWeights> = self
            .prefs
            .iter()
            .map(|p| EffectiveWeights::new(params, p))
            .collect();
        let mut links = self.template.clone();
        for (s, chunk) in links.chunks_mut(m).enumerate() {
            let e = &eff[s];
            for link in chunk {
                // Without any static weight there is nothing to rank by yet.
                link.score = if e.static_sum() > 0.0 {
                    e.preliminary_unchecked(link.subscores())
                } else {
                    0.5
                };
            }
        }

        let social_links = self.social_network(params)?;
        let mut influencers: Vec<Vec<(usize, f64)>> =
            alloc::vec![Vec::new(); self.seller_ids.len()];
        for l in social_links.iter().filter(|l| l.active) {
            influencers[l.to].push((l.from, l.score));
        }
        for list in &mut influencers {
            list.sort_by_key(|&(from, _)| from);
        }

        Ok(ModelState {
            model: self,
            params: *params,
            links,
            social_links,
            influencers,
            eff,
            iteration: 0,
            converged: false,
            cycle_detected: false,
            seed,
            rng: SimRng::seed_from_u64(seed),
            history: VecDeque::with_capacity(CYCLE_HISTORY),
        })
    }

    /// Steps until the active network repeats or `max_iter` is reached.
    pub fn run_state(&self, params: &GlobalParams, seed: u64) -> Result<ModelState<'_>> {
        let mut state = self.init(params, seed)?;
        state.run_until_stable(self.config.max_iter);
        Ok(state)
    }

    pub fn run(&self, params: &GlobalParams, seed: u64) -> Result<RunReport> {
        Ok(self.run_state(params, seed)?.report())
    }
}

/// Builds the model and runs it once.
pub fn run(
    dataset: &Dataset,
    params: &GlobalParams,
    config: ModelConfig,
    seed: u64,
) -> Result<RunReport> {
    Model::new(dataset, config)?.run(params, seed)
}

fn fill_static_subscores(links: &mut [TradingLink], m: usize, scope: NormalizationScope) {
    let group = match scope {
        NormalizationScope::PerSeller => m,
        NormalizationScope::Global => links.len(),
    };
    let mut buf = Vec::with_capacity(group);
    for chunk in links.chunks_mut(group) {
        let mut rescale =
            |get: fn(&TradingLink) -> f64, set: fn(&mut TradingLink, f64), inverted| {
                buf.clear();
                buf.extend(chunk.iter().map(get));
                normalize_in_place(&mut buf, inverted);
                for (l, &v) in chunk.iter_mut().zip(&buf) {
                    set(l, v);
                }
            };
        rescale(|l| l.price, |l, v| l.score_price = v, false);
        rescale(|l| l.length, |l, v| l.score_dist = v, true);
        rescale(|l| l.debts, |l, v| l.score_debts = v, false);
    }
}

/// Outcome of one model run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub seed: u64,
    pub iterations_used: usize,
    pub converged: bool,
    /// Some selection during the run repeated an older, non-adjacent one.
    pub cycle_detected: bool,
    pub observation: ObservationRecord,
    /// Active `(seller, buyer)` pairs, ascending.
    pub active_links: Vec<LinkKey>,
}

/// A parameterized model between iterations.
#[derive(Debug, Clone)]
pub struct ModelState<'m> {
    model: &'m Model,
    pub params: GlobalParams,
    links: Vec<TradingLink>,
    social_links: Vec<SocialLink>,
    influencers: Vec<Vec<(usize, f64)>>,
    eff: Vec<EffectiveWeights>,
    pub iteration: usize,
    pub converged: bool,
    pub cycle_detected: bool,
    pub seed: u64,
    rng: SimRng,
    history: VecDeque<Vec<bool>>,
}

impl<'m> ModelState<'m> {
    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// Seller-major trading links, `buyer_ids().len()` per seller.
    pub fn links(&self) -> &[TradingLink] {
        &self.links
    }

    /// Pruned social links with their activation flags.
    pub fn social_links(&self) -> &[SocialLink] {
        &self.social_links
    }

    /// Active influencers of seller `i` as `(influencer, social score)`.
    pub fn influencers(&self, i: usize) -> &[(usize, f64)] {
        &self.influencers[i]
    }

    pub fn active_links(&self) -> Vec<LinkKey> {
        self.links
            .iter()
            .filter(|l| l.status_model)
            .map(TradingLink::key)
            .collect()
    }

    /// Sets each link's social sub-score: the social-score-weighted sum of
    /// the influencers' previous signals for the same buyer, then divided by
    /// the largest such sum over all links (all zero stays zero).
    pub fn social_subscore_pass(&mut self) {
        let m = self.model.buyer_ids.len();
        let use_status =
            self.model.config.social_signal == SocialSignal::Active && self.iteration > 0;
        let signal: Vec<f64> = self
            .links
            .iter()
            .map(|l| match (use_status, l.status_model) {
                (true, true) => 1.0,
                (true, false) => 0.0,
                (false, _) => l.score,
            })
            .collect();
        let influencers = &self.influencers;
        par::for_each_chunk(&mut self.links, m, |b, chunk| {
            for (x, link) in chunk.iter_mut().enumerate() {
                link.score_social = influencers[b]
                    .iter()
                    .map(|&(a, s)| signal[a * m + x] * s)
                    .sum();
            }
        });
        let max = self
            .links
            .iter()
            .map(|l| l.score_social)
            .fold(0.0, f64::max);
        if max > 0.0 {
            for l in &mut self.links {
                l.score_social /= max;
            }
        }
    }

    /// Stages final scores for every link, then commits them together.
    fn final_score_pass(&mut self) {
        let m = self.model.buyer_ids.len();
        let eff = &self.eff;
        par::for_each_chunk(&mut self.links, m, |s, chunk| {
            for link in chunk.iter_mut() {
                link.score_next = eff[s].final_unchecked(link.subscores(), link.score_social);
            }
        });
        for l in &mut self.links {
            l.score = l.score_next;
        }
    }

    /// Marks each seller's `n_buyer` highest-scored links active.
    pub fn select_active_trading(&mut self) {
        let m = self.model.buyer_ids.len();
        let mut scores = Vec::with_capacity(m);
        for (s, chunk) in self.links.chunks_mut(m).enumerate() {
            scores.clear();
            scores.extend(chunk.iter().map(|l| l.score));
            let chosen = select_top(&scores, self.model.n_buyer[s], &mut self.rng);
            for l in chunk.iter_mut() {
                l.status_model = false;
            }
            for i in chosen {
                chunk[i].status_model = true;
            }
        }
    }

    /// One iteration: social pass, final scores, selection, convergence check.
    pub fn step(&mut self) {
        self.social_subscore_pass();
        self.final_score_pass();
        self.select_active_trading();
        self.iteration += 1;

        let selection: Vec<bool> = self.links.iter().map(|l| l.status_model).collect();
        self.converged = self.history.back() == Some(&selection);
        if !self.converged
            && self
                .history
                .iter()
                .rev()
                .skip(1)
                .any(|past| *past == selection)
        {
            self.cycle_detected = true;
        }
        if self.history.len() == CYCLE_HISTORY {
            self.history.pop_front();
        }
        self.history.push_back(selection);
    }

    /// Steps until two consecutive selections agree or `iteration` reaches
    /// `max_iter`.
    pub fn run_until_stable(&mut self, max_iter: usize) {
        while !self.converged && self.iteration < max_iter {
            self.step();
        }
    }

    pub fn observation(&self) -> ObservationRecord {
        metrics::observe(&self.model.agent_ids(), &self.links)
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            seed: self.seed,
            iterations_used: self.iteration,
            converged: self.converged,
            cycle_detected: self.cycle_detected,
            observation: self.observation(),
            active_links: self.active_links(),
        }
    }
}
