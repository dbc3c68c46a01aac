//! Directed social network among sellers.
//!
//! Every ordered seller pair gets a link; each unordered pair keeps only its
//! stronger direction, and each seller then listens to its `k` strongest
//! incoming links. Ties are settled by seller id so the topology never
//! depends on a random draw.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::domain::{AgentId, GlobalParams, SellerAgent};
use crate::scoring::{social_criteria, social_link_score};
use crate::{Error, Result};

/// Influence of seller `from` on seller `to`. Both are indices into the
/// seller slice the link was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocialLink {
    pub from: usize,
    pub to: usize,
    pub score: f64,
    pub active: bool,
}

/// One inactive, unscored link for every ordered pair of distinct sellers.
pub fn build_social_links(sellers: &[SellerAgent]) -> Result<Vec<SocialLink>> {
    let n = sellers.len();
    if n < 2 {
        return Err(Error::TooFewSellers(n));
    }
    let mut links = Vec::with_capacity(n * (n - 1));
    for from in 0..n {
        for to in 0..n {
            if from != to {
                links.push(SocialLink {
                    from,
                    to,
                    score: 0.0,
                    active: false,
                });
            }
        }
    }
    Ok(links)
}

/// Whether `a` beats `b` for the same unordered pair: strictly higher
/// score, or equal score and a lower influencer id.
pub(crate) fn survives(a: &SocialLink, b: &SocialLink, ids: &[AgentId]) -> bool {
    match a.score.total_cmp(&b.score) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => ids[a.from] < ids[b.from],
    }
}

/// Scores every link and keeps one direction per unordered pair.
///
/// Surviving links come out ordered by `(min(from, to), max(from, to))`.
pub fn score_and_prune(
    links: &[SocialLink],
    sellers: &[SellerAgent],
    w: &GlobalParams,
) -> Result<Vec<SocialLink>> {
    let ids: Vec<AgentId> = sellers.iter().map(|s| s.id).collect();
    let mut scored = Vec::with_capacity(links.len());
    for link in links {
        let c = social_criteria(&sellers[link.from], &sellers[link.to]);
        scored.push(SocialLink {
            score: social_link_score(&c, w)?,
            ..*link
        });
    }
    let pair = |l: &SocialLink| (l.from.min(l.to), l.from.max(l.to));
    scored.sort_by(|a, b| pair(a).cmp(&pair(b)).then(a.from.cmp(&b.from)));

    let mut kept: Vec<SocialLink> = Vec::with_capacity(scored.len() / 2 + 1);
    for link in scored {
        match kept.last_mut() {
            Some(last) if pair(last) == pair(&link) => {
                if survives(&link, last, &ids) {
                    *last = link;
                }
            }
            _ => kept.push(link),
        }
    }
    Ok(kept)
}

/// Orders incoming links strongest first, lower influencer id first on ties.
pub(crate) fn influence_order(a: &SocialLink, b: &SocialLink, ids: &[AgentId]) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| ids[a.from].cmp(&ids[b.from]))
}

/// Activates, for every receiving seller, its `round(n_social)` strongest
/// incoming links (all of them if it has fewer). `ids[i]` is the id of
/// seller `i`.
pub fn select_active(links: &[SocialLink], n_social: f64, ids: &[AgentId]) -> Vec<SocialLink> {
    let k = libm::floor(n_social.max(0.0) + 0.5) as usize;
    let mut by_receiver: Vec<Vec<usize>> = alloc::vec![Vec::new(); ids.len()];
    for (i, link) in links.iter().enumerate() {
        by_receiver[link.to].push(i);
    }
    let mut out: Vec<SocialLink> = links
        .iter()
        .map(|l| SocialLink {
            active: false,
            ..*l
        })
        .collect();
    for incoming in &mut by_receiver {
        incoming.sort_by(|&a, &b| influence_order(&links[a], &links[b], ids));
        for &i in incoming.iter().take(k) {
            out[i].active = true;
        }
    }
    out
}
