use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tradenet_core::metrics::components;
use tradenet_core::AgentId;

fn bfs_components(
    nodes: &[AgentId],
    edges: &[(AgentId, AgentId)],
    include_isolated: bool,
) -> (usize, f64) {
    let mut adj: BTreeMap<AgentId, Vec<AgentId>> = BTreeMap::new();
    if include_isolated {
        for &n in nodes {
            adj.entry(n).or_default();
        }
    }
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    let total: usize = sizes.iter().sum();
    let mean = if sizes.is_empty() {
        0.0
    } else {
        total as f64 / sizes.len() as f64
    };
    (sizes.len(), mean)
}

#[test]
fn union_find_matches_breadth_first_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let n = rng.random_range(1..=50u32);
        let nodes: Vec<AgentId> = (0..n).map(|i| AgentId(i * 3 + 1)).collect();
        let density = rng.random_range(0.0..0.15);
        let mut edges = Vec::new();
        for i in 0..n as usize {
            for j in 0..n as usize {
                if i != j && rng.random_bool(density) {
                    edges.push((nodes[i], nodes[j]));
                }
            }
        }
        for include_isolated in [true, false] {
            let got = components(&nodes, &edges, include_isolated);
            let (count, mean) = bfs_components(&nodes, &edges, include_isolated);
            assert_eq!(got.count, count);
            assert_eq!(got.mean_size, mean);
        }
    }
}

#[test]
fn empty_and_singleton_graphs() {
    assert_eq!(components(&[], &[], true).count, 0);
    assert_eq!(components(&[], &[], true).mean_size, 0.0);
    let one = components(&[AgentId(4)], &[], true);
    assert_eq!((one.count, one.mean_size), (1, 1.0));
    assert_eq!(components(&[AgentId(4)], &[], false).count, 0);
}
