//! Synthetic survey populations with a planted trading network.
//!
//! Sellers are placed in a district > subdistrict > village hierarchy and
//! drawn from the survey marginals. Buyers sit anywhere in the region; the
//! remote ones (factories, port traders) pay more than those near the
//! villages. The empirical links are the network the model itself
//! produces under the planted parameters, so re-running those parameters
//! reproduces them exactly.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_distr::{LogNormal, Normal};
use serde::{Deserialize, Serialize};

use tradenet_core::simulation::{ModelConfig, NBuyerMode};
use tradenet_core::{
    AgentId, BuyerAgent, Dataset, DistanceMatrix, EmpiricalLink, Error, GlobalParams, Model,
    SellerAgent, SimRng,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub n_sellers: usize,
    pub n_buyers: usize,
    pub n_districts: u32,
    pub n_subdistricts: u32,
    pub n_villages: u32,
    /// Region centre (south, east) and half-width, in degrees.
    pub center: (f64, f64),
    pub extent: f64,
    /// District centres lie within this share of `extent` from the centre.
    pub settlement_share: f64,
    /// Sellers scatter this far around their village centre.
    pub village_radius: f64,
    /// Shares of ethnic groups 1.., summing to about 1.
    pub ethnicity_freq: Vec<f64>,
    /// Shares of education levels 1..=6.
    pub education_freq: Vec<f64>,
    pub prestigious_job_rate: f64,
    pub group_activity_rate: f64,
    /// Shares of 1..=4 groups among active members.
    pub group_count_freq: Vec<f64>,
    pub employees_mean: f64,
    pub employees_sd: f64,
    pub transport_mean: f64,
    pub transport_sd: f64,
    pub age_min: u32,
    pub age_max: u32,
    pub house_value_log_mean: f64,
    pub house_value_log_sd: f64,
    pub income_log_mean: f64,
    pub income_log_sd: f64,
    pub sales_log_mean: f64,
    pub sales_log_sd: f64,
    /// Share of sellers without debts.
    pub debt_zero_share: f64,
    pub debt_log_mean: f64,
    pub debt_log_sd: f64,
    pub price_mean: f64,
    pub price_sd: f64,
    /// Price gain from the region centre to a buyer at distance `extent`;
    /// negative values make central buyers pay more.
    pub price_remoteness_premium: f64,
    pub planted_params: GlobalParams,
    pub max_iter: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            schema_version: 1,
            seed: 0,
            n_sellers: 179,
            n_buyers: 42,
            n_districts: 3,
            n_subdistricts: 8,
            n_villages: 40,
            center: (-1.6, 103.6),
            extent: 1.0,
            settlement_share: 0.6,
            village_radius: 0.02,
            ethnicity_freq: vec![0.3966, 0.5251, 0.0279, 0.0168, 0.0335],
            education_freq: vec![0.0223, 0.1061, 0.3017, 0.1844, 0.0223, 0.3631],
            prestigious_job_rate: 0.06,
            group_activity_rate: 0.3911,
            group_count_freq: vec![0.6, 0.25, 0.1, 0.05],
            employees_mean: 5.7,
            employees_sd: 6.8,
            transport_mean: 2060.0,
            transport_sd: 2731.0,
            age_min: 25,
            age_max: 70,
            house_value_log_mean: 18.8,
            house_value_log_sd: 0.8,
            income_log_mean: 17.9,
            income_log_sd: 0.7,
            sales_log_mean: 20.5,
            sales_log_sd: 1.5,
            debt_zero_share: 0.4,
            debt_log_mean: 16.0,
            debt_log_sd: 1.0,
            price_mean: 9000.0,
            price_sd: 250.0,
            price_remoteness_premium: 800.0,
            planted_params: GlobalParams::default(),
            max_iter: tradenet_core::simulation::DEFAULT_MAX_ITER,
        }
    }
}

const FREQ_SUM_TOL: f64 = 1e-3;

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_sellers < 2 || self.n_buyers == 0 {
            return bad("need at least 2 sellers and 1 buyer".into());
        }
        if self.n_districts == 0
            || self.n_districts > self.n_subdistricts
            || self.n_subdistricts > self.n_villages
            || self.n_villages as usize > self.n_sellers
        {
            return bad(format!(
                "need 1 <= districts ({}) <= subdistricts ({}) <= villages ({}) <= sellers ({})",
                self.n_districts, self.n_subdistricts, self.n_villages, self.n_sellers
            ));
        }
        for (name, freq, len) in [
            ("ethnicity_freq", &self.ethnicity_freq, None),
            ("education_freq", &self.education_freq, Some(6)),
            ("group_count_freq", &self.group_count_freq, Some(4)),
        ] {
            if len.is_some_and(|l| freq.len() != l) || freq.is_empty() {
                return bad(format!("{name} has {} entries", freq.len()));
            }
            let sum: f64 = freq.iter().sum();
            if freq.iter().any(|&f| !(f >= 0.0)) || (sum - 1.0).abs() > FREQ_SUM_TOL {
                return bad(format!(
                    "{name} must be non-negative and sum to 1, got {sum}"
                ));
            }
        }
        for (name, p) in [
            ("prestigious_job_rate", self.prestigious_job_rate),
            ("group_activity_rate", self.group_activity_rate),
            ("debt_zero_share", self.debt_zero_share),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if !(self.extent > 0.0) || !(0.0..=1.0).contains(&self.settlement_share) {
            return bad("need extent > 0 and settlement_share in [0, 1]".into());
        }
        if self.age_min == 0 || self.age_min > self.age_max {
            return bad("need 0 < age_min <= age_max".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        self.planted_params.validate()
    }

    fn buyer_id_base(&self) -> u32 {
        (self.n_sellers as u32 + 1).max(10_000)
    }
}

/// The planted truth behind a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub params: GlobalParams,
    pub seed: u64,
    pub model: ModelConfig,
    pub iterations_used: usize,
    pub converged: bool,
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd.max(0.0)).expect("finite normal parameters")
}

fn log_normal(mean: f64, sd: f64) -> LogNormal<f64> {
    LogNormal::new(mean, sd.max(0.0)).expect("finite log-normal parameters")
}

struct Geography {
    villages: Vec<(u32, u32, (f64, f64))>,
}

fn geography(config: &SyntheticConfig, rng: &mut SimRng) -> Geography {
    let (cs, ce) = config.center;
    let e = config.extent;
    let d = config.settlement_share * e;
    let districts: Vec<(f64, f64)> = (0..config.n_districts)
        .map(|_| (cs + rng.random_range(-d..=d), ce + rng.random_range(-d..=d)))
        .collect();
    let subdistricts: Vec<(u32, (f64, f64))> = (0..config.n_subdistricts)
        .map(|i| {
            let d = i % config.n_districts;
            let (s, east) = districts[d as usize];
            let spread = 0.25 * e;
            (
                d,
                (
                    s + rng.random_range(-spread..=spread),
                    east + rng.random_range(-spread..=spread),
                ),
            )
        })
        .collect();
    let villages = (0..config.n_villages)
        .map(|v| {
            let sd = v % config.n_subdistricts;
            let (d, (s, east)) = subdistricts[sd as usize];
            let spread = 0.1 * e;
            (
                d,
                sd,
                (
                    s + rng.random_range(-spread..=spread),
                    east + rng.random_range(-spread..=spread),
                ),
            )
        })
        .collect();
    Geography { villages }
}

/// Draws the seller population alone, without debts or links.
pub fn gen_sellers(config: &SyntheticConfig) -> Result<Vec<SellerAgent>, Error> {
    config.validate()?;
    let mut rng = SimRng::seed_from_u64(config.seed);
    Ok(draw_sellers(config, &geography(config, &mut rng), &mut rng))
}

fn draw_sellers(config: &SyntheticConfig, geo: &Geography, rng: &mut SimRng) -> Vec<SellerAgent> {
    let weighted = |f: &[f64]| WeightedIndex::new(f).expect("validated frequencies");
    let ethnicity = weighted(&config.ethnicity_freq);
    let education = weighted(&config.education_freq);
    let groups = weighted(&config.group_count_freq);
    let employees = normal(config.employees_mean, config.employees_sd);
    let transport = normal(config.transport_mean, config.transport_sd);
    let house = log_normal(config.house_value_log_mean, config.house_value_log_sd);
    let income = log_normal(config.income_log_mean, config.income_log_sd);
    let sales = log_normal(config.sales_log_mean, config.sales_log_sd);
    let hhs_vlg: Vec<u32> = (0..geo.villages.len())
        .map(|_| rng.random_range(100..=600))
        .collect();

    (0..config.n_sellers)
        .map(|i| {
            let v = i % geo.villages.len();
            let (district, subdistrict, (vs, ve)) = geo.villages[v];
            let r = config.village_radius;
            let active_group = rng.random_bool(config.group_activity_rate);
            SellerAgent {
                id: AgentId(i as u32 + 1),
                village_id: v as u32 + 1,
                subdistrict_id: subdistrict + 1,
                district_id: district + 1,
                gps_s: round_to(vs + rng.random_range(-r..=r), 5),
                gps_e: round_to(ve + rng.random_range(-r..=r), 5),
                education: education.sample(rng) as u8 + 1,
                ethnicity: ethnicity.sample(rng) as u32 + 1,
                transport: transport.sample(rng).max(0.0).round(),
                employees: employees.sample(rng).max(0.0).round() as u32,
                prestigious_job: rng.random_bool(config.prestigious_job_rate),
                active_group,
                group_count: if active_group {
                    groups.sample(rng) as u8 + 1
                } else {
                    0
                },
                age: rng.random_range(config.age_min..=config.age_max) as f64,
                house_value: house.sample(rng).round().max(1.0),
                hh_size: rng.random_range(2..=7),
                hhs_vlg: hhs_vlg[v],
                income: income.sample(rng).round(),
                debt_by_buyer: BTreeMap::new(),
                n_buyer_empirical: 0,
                total_sales: sales.sample(rng).round().max(3.0),
            }
        })
        .collect()
}

fn draw_buyers(config: &SyntheticConfig, rng: &mut SimRng) -> Vec<BuyerAgent> {
    let (cs, ce) = config.center;
    let e = config.extent;
    let noise = normal(0.0, config.price_sd);
    let base = config.buyer_id_base();
    (0..config.n_buyers)
        .map(|j| {
            let s = round_to(cs + rng.random_range(-e..=e), 5);
            let east = round_to(ce + rng.random_range(-e..=e), 5);
            let remoteness = ((s - cs).powi(2) + (east - ce).powi(2)).sqrt() / e;
            let price = config.price_mean
                + config.price_remoteness_premium * remoteness
                + noise.sample(rng);
            BuyerAgent {
                id: AgentId(base + j as u32),
                price: price.round().max(1.0),
                location: Some((s, east)),
            }
        })
        .collect()
}

/// Generates a dataset whose empirical links are the planted network, and
/// the truth that produced it.
pub fn gen_synthetic(config: &SyntheticConfig) -> Result<(Dataset, PlantedTruth), Error> {
    config.validate()?;
    let mut rng = SimRng::seed_from_u64(config.seed);
    let geo = geography(config, &mut rng);
    let mut sellers = draw_sellers(config, &geo, &mut rng);
    let buyers = draw_buyers(config, &mut rng);

    let debt = log_normal(config.debt_log_mean, config.debt_log_sd);
    for s in &mut sellers {
        if !rng.random_bool(config.debt_zero_share) {
            let creditor = buyers[rng.random_range(0..buyers.len())].id;
            s.debt_by_buyer
                .insert(creditor, debt.sample(&mut rng).round().max(1.0));
        }
    }

    let points: Vec<(AgentId, f64, f64)> = sellers
        .iter()
        .map(|s| (s.id, s.gps_s, s.gps_e))
        .chain(
            buyers
                .iter()
                .filter_map(|b| b.location.map(|(s, e)| (b.id, s, e))),
        )
        .collect();
    let distance = DistanceMatrix::from_points(&points)?;

    let mut dataset = Dataset {
        sellers,
        buyers,
        distance,
        empirical_links: Vec::new(),
    };
    let model_config = ModelConfig {
        n_buyer_mode: NBuyerMode::Regression,
        max_iter: config.max_iter,
        ..ModelConfig::default()
    };
    let model = Model::new(&dataset, model_config)?;
    let report = model.run(&config.planted_params, config.seed)?;
    let tons = log_normal(2.5, 0.8);
    dataset.empirical_links = report
        .active_links
        .iter()
        .map(|&(seller, buyer)| EmpiricalLink {
            seller,
            buyer,
            tons: round_to(tons.sample(&mut rng), 1),
        })
        .collect();
    dataset.recount_buyers();

    let truth = PlantedTruth {
        params: config.planted_params,
        seed: config.seed,
        model: model_config,
        iterations_used: report.iterations_used,
        converged: report.converged,
    };
    Ok((dataset, truth))
}
