//! Network observations: correctly predicted links, connected components,
//! and the scenario indicators.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::domain::{AgentId, LinkKey};
use crate::simulation::{ModelState, TradingLink};
use crate::unionfind::DisjointSet;
use crate::{Error, Result};

/// Observation metrics of one simulated network.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservationRecord {
    pub active_tradings_n: usize,
    pub correct_tradings_n: usize,
    pub correct_tradings_p: f64,
    /// Components over all agents, unchosen buyers counted as singletons.
    pub components_n: usize,
    /// Mean component size over all agents.
    pub components_size_mu: f64,
    /// Components of the active network alone, isolated agents ignored.
    pub components_n_active_only: usize,
    pub mean_link_length: f64,
    pub mean_price: f64,
}

impl ObservationRecord {
    pub const FIELDS: [&'static str; 8] = [
        "active_tradings_n",
        "correct_tradings_n",
        "correct_tradings_p",
        "components_n",
        "components_size_mu",
        "components_n_active_only",
        "mean_link_length",
        "mean_price",
    ];
}

/// Number of active links that are also empirical, and their share of the
/// active links (0 for an empty active set).
pub fn correct_links(active: &BTreeSet<LinkKey>, empirical: &BTreeSet<LinkKey>) -> (usize, f64) {
    let n = active.intersection(empirical).count();
    let p = if active.is_empty() {
        0.0
    } else {
        n as f64 / active.len() as f64
    };
    (n, p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentStats {
    pub count: usize,
    pub mean_size: f64,
}

/// Connected components of the undirected graph spanned by `links`.
///
/// With `include_isolated` every agent of `agents` counts, degree-0 agents
/// as singletons; otherwise only agents touched by a link count. Link
/// endpoints missing from `agents` are added to the node set.
pub fn components(agents: &[AgentId], links: &[LinkKey], include_isolated: bool) -> ComponentStats {
    let mut index: BTreeMap<AgentId, usize> = BTreeMap::new();
    for &a in agents {
        let next = index.len();
        index.entry(a).or_insert(next);
    }
    for &(a, b) in links {
        for id in [a, b] {
            let next = index.len();
            index.entry(id).or_insert(next);
        }
    }
    let mut sets = DisjointSet::new(index.len());
    let mut touched = alloc::vec![false; index.len()];
    for (a, b) in links {
        let (ia, ib) = (index[a], index[b]);
        touched[ia] = true;
        touched[ib] = true;
        sets.union(ia, ib);
    }
    let mut roots = BTreeSet::new();
    let mut counted = 0usize;
    for (node, &linked) in touched.iter().enumerate() {
        if include_isolated || linked {
            counted += 1;
            roots.insert(sets.find(node));
        }
    }
    let count = roots.len();
    ComponentStats {
        count,
        mean_size: if count == 0 {
            0.0
        } else {
            counted as f64 / count as f64
        },
    }
}

/// Indicators compared across policy scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioIndicators {
    pub mean_price: f64,
    pub mean_link_length: f64,
    pub components_n: usize,
    pub components_size_mu: f64,
}

impl ScenarioIndicators {
    pub const NAMES: [&'static str; 4] = [
        "mean_price",
        "mean_link_length",
        "components_n",
        "components_size_mu",
    ];

    pub fn values(&self) -> [f64; 4] {
        [
            self.mean_price,
            self.mean_link_length,
            self.components_n as f64,
            self.components_size_mu,
        ]
    }
}

fn active_keys<'a>(links: impl Iterator<Item = &'a TradingLink>) -> Vec<LinkKey> {
    links
        .filter(|l| l.status_model)
        .map(|l| (l.seller, l.buyer))
        .collect()
}

fn means(links: &[TradingLink]) -> (usize, f64, f64) {
    let (mut n, mut price, mut length) = (0usize, 0.0, 0.0);
    for l in links.iter().filter(|l| l.status_model) {
        n += 1;
        price += l.price;
        length += l.length;
    }
    if n == 0 {
        (0, 0.0, 0.0)
    } else {
        (n, price / n as f64, length / n as f64)
    }
}

/// Mean price and length over active links, plus active-only components.
pub fn scenario_indicators(state: &ModelState<'_>) -> Result<ScenarioIndicators> {
    indicators_of(state.links())
}

pub(crate) fn indicators_of(links: &[TradingLink]) -> Result<ScenarioIndicators> {
    let (n, mean_price, mean_link_length) = means(links);
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    let active = active_keys(links.iter());
    let stats = components(&[], &active, false);
    Ok(ScenarioIndicators {
        mean_price,
        mean_link_length,
        components_n: stats.count,
        components_size_mu: stats.mean_size,
    })
}

/// Full observation record for a set of trading links over `agents`.
pub(crate) fn observe(agents: &[AgentId], links: &[TradingLink]) -> ObservationRecord {
    let active: Vec<LinkKey> = active_keys(links.iter());
    let active_tradings_n = active.len();
    let correct_tradings_n = links
        .iter()
        .filter(|l| l.status_model && l.status_data)
        .count();
    let correct_tradings_p = if active_tradings_n == 0 {
        0.0
    } else {
        correct_tradings_n as f64 / active_tradings_n as f64
    };
    let all = components(agents, &active, true);
    let active_only = components(agents, &active, false);
    let (_, mean_price, mean_link_length) = means(links);
    ObservationRecord {
        active_tradings_n,
        correct_tradings_n,
        correct_tradings_p,
        components_n: all.count,
        components_size_mu: all.mean_size,
        components_n_active_only: active_only.count,
        mean_link_length,
        mean_price,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn id(i: u32) -> AgentId {
        AgentId(i)
    }

    fn set(pairs: &[(u32, u32)]) -> BTreeSet<LinkKey> {
        pairs.iter().map(|&(a, b)| (id(a), id(b))).collect()
    }

    #[test]
    fn correct_link_shares() {
        let e = set(&[(1, 10), (2, 11)]);
        assert_eq!(correct_links(&e, &e), (2, 1.0));
        assert_eq!(correct_links(&set(&[(1, 11), (2, 10)]), &e), (0, 0.0));
        assert_eq!(correct_links(&BTreeSet::new(), &e), (0, 0.0));

        let active: BTreeSet<_> = (0..100).map(|i| (id(i), id(1000))).collect();
        let empirical: BTreeSet<_> = (0..49).map(|i| (id(i), id(1000))).collect();
        let (n, p) = correct_links(&active, &empirical);
        assert_eq!(n, 49);
        assert!((p - 0.49).abs() < 1e-15);
    }

    #[test]
    fn path_is_one_component() {
        let agents: Vec<_> = (1..=4).map(id).collect();
        let links = vec![(id(1), id(2)), (id(3), id(2)), (id(3), id(4))];
        let s = components(&agents, &links, true);
        assert_eq!((s.count, s.mean_size), (1, 4.0));
    }

    #[test]
    fn isolated_agents_counted_only_on_request() {
        let agents: Vec<_> = (1..=5).map(id).collect();
        let links = vec![(id(1), id(2)), (id(3), id(4))];
        let with = components(&agents, &links, true);
        assert_eq!(with.count, 3);
        assert!((with.mean_size - 5.0 / 3.0).abs() < 1e-15);
        let without = components(&agents, &links, false);
        assert_eq!((without.count, without.mean_size), (2, 2.0));
    }

    #[test]
    fn empty_graph() {
        assert_eq!(components(&[], &[], true).count, 0);
        assert_eq!(components(&[], &[], true).mean_size, 0.0);
    }

    fn link(seller: u32, buyer: u32, price: f64, length: f64, active: bool) -> TradingLink {
        TradingLink {
            seller: id(seller),
            buyer: id(buyer),
            length,
            price,
            status_model: active,
            ..TradingLink::default()
        }
    }

    #[test]
    fn indicator_means() {
        let links = vec![
            link(1, 10, 9000.0, 2.0, true),
            link(2, 10, 9000.0, 4.0, true),
            link(2, 11, 12000.0, 1.0, false),
        ];
        let ind = indicators_of(&links).unwrap();
        assert_eq!(ind.mean_price, 9000.0);
        assert_eq!(ind.mean_link_length, 3.0);
        assert_eq!((ind.components_n, ind.components_size_mu), (1, 3.0));
        let none = vec![link(1, 10, 9000.0, 2.0, false)];
        assert_eq!(indicators_of(&none), Err(Error::EmptyNetwork));
    }

    #[test]
    fn relabeling_does_not_change_share() {
        let e = set(&[(1, 10), (2, 11), (3, 10)]);
        let a = set(&[(1, 10), (2, 10), (3, 10)]);
        let shift = |s: &BTreeSet<LinkKey>| -> BTreeSet<LinkKey> {
            s.iter()
                .map(|&(x, y)| (id(x.0 + 500), id(y.0 * 3)))
                .collect()
        };
        assert_eq!(correct_links(&a, &e), correct_links(&shift(&a), &shift(&e)));
    }
}
