//! Policy scenarios: dataset transformations and replicated runs.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::domain::{Dataset, GlobalParams};
use crate::metrics::{scenario_indicators, ScenarioIndicators};
use crate::simulation::{Model, ModelConfig};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioId {
    Baseline,
    /// Halve every debt.
    A1,
    /// Remove every debt.
    A2,
    /// Raise education levels 1 and 2 to 3.
    B1,
    /// Raise education to the highest level in the seller's village.
    B2,
    /// Lift the lower half of transport capacities to the mean.
    C,
}

impl ScenarioId {
    pub const ALL: [Self; 6] = [
        Self::Baseline,
        Self::A1,
        Self::A2,
        Self::B1,
        Self::B2,
        Self::C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::A1 => "A1",
            Self::A2 => "A2",
            Self::B1 => "B1",
            Self::B2 => "B2",
            Self::C => "C",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub replications: usize,
    pub base_seed: u64,
}

impl ScenarioSpec {
    pub const DEFAULT_REPLICATIONS: usize = 20;

    pub fn new(id: ScenarioId) -> Self {
        Self {
            id,
            replications: Self::DEFAULT_REPLICATIONS,
            base_seed: 0,
        }
    }
}

/// Returns a copy of `dataset` with the scenario's policy applied. Agent
/// counts, ids and distances never change.
pub fn apply_scenario(dataset: &Dataset, id: ScenarioId) -> Dataset {
    let mut out = dataset.clone();
    match id {
        ScenarioId::Baseline => {}
        ScenarioId::A1 | ScenarioId::A2 => {
            let factor = if id == ScenarioId::A1 { 0.5 } else { 0.0 };
            for s in &mut out.sellers {
                for debt in s.debt_by_buyer.values_mut() {
                    *debt *= factor;
                }
            }
        }
        ScenarioId::B1 => {
            for s in &mut out.sellers {
                if s.education < 3 {
                    s.education = 3;
                }
            }
        }
        ScenarioId::B2 => {
            let mut best: BTreeMap<(u32, u32, u32), u8> = BTreeMap::new();
            let village =
                |s: &crate::domain::SellerAgent| (s.district_id, s.subdistrict_id, s.village_id);
            for s in &dataset.sellers {
                let e = best.entry(village(s)).or_insert(s.education);
                *e = (*e).max(s.education);
            }
            for s in &mut out.sellers {
                s.education = best[&village(s)];
            }
        }
        ScenarioId::C => {
            if dataset.sellers.is_empty() {
                return out;
            }
            let mut sorted: Vec<f64> = dataset.sellers.iter().map(|s| s.transport).collect();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let median = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
            };
            let mean = sorted.iter().sum::<f64>() / n as f64;
            for s in &mut out.sellers {
                if s.transport < median {
                    s.transport = mean;
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub scenario: ScenarioId,
    pub replication: usize,
    pub seed: u64,
    pub indicators: Result<ScenarioIndicators>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSummary {
    pub scenario: ScenarioId,
    pub indicator: &'static str,
    pub mean: f64,
    /// Sample standard deviation; 0 with fewer than two successful runs.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub replications: Vec<Replication>,
    pub summary: Vec<IndicatorSummary>,
}

/// Runs replication `r` with seed `base_seed + r` on the transformed
/// dataset and summarises each indicator. Failed replications are recorded
/// and left out of the summary.
pub fn run_scenario(
    dataset: &Dataset,
    params: &GlobalParams,
    config: ModelConfig,
    spec: &ScenarioSpec,
) -> Result<ScenarioOutcome> {
    if spec.replications == 0 {
        return Err(Error::InvalidConfig(
            "replications must be at least 1".into(),
        ));
    }
    let transformed = apply_scenario(dataset, spec.id);
    let model = Model::new(&transformed, config)?;
    let seeds: Vec<(usize, u64)> = (0..spec.replications)
        .map(|r| (r, spec.base_seed.wrapping_add(r as u64)))
        .collect();
    let replications = par::map(&seeds, |&(replication, seed)| Replication {
        scenario: spec.id,
        replication,
        seed,
        indicators: model
            .run_state(params, seed)
            .and_then(|state| scenario_indicators(&state)),
    });
    let summary = summarize(spec.id, &replications);
    Ok(ScenarioOutcome {
        replications,
        summary,
    })
}

fn summarize(scenario: ScenarioId, reps: &[Replication]) -> Vec<IndicatorSummary> {
    let ok: Vec<[f64; 4]> = reps
        .iter()
        .filter_map(|r| r.indicators.as_ref().ok().map(ScenarioIndicators::values))
        .collect();
    ScenarioIndicators::NAMES
        .iter()
        .enumerate()
        .map(|(i, &indicator)| {
            let n = ok.len();
            let mean = if n == 0 {
                f64::NAN
            } else {
                ok.iter().map(|v| v[i]).sum::<f64>() / n as f64
            };
            let sd = if n < 2 {
                0.0
            } else {
                let ss: f64 = ok.iter().map(|v| (v[i] - mean) * (v[i] - mean)).sum();
                libm::sqrt(ss / (n - 1) as f64)
            };
            IndicatorSummary {
                scenario,
                indicator,
                mean,
                sd,
            }
        })
        .collect()
}
