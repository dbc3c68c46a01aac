//! Agents, links, global parameters and dataset invariants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Identifier of a seller or a buyer. Seller and buyer ids share one space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `(seller, buyer)` key of a trading link.
pub type LinkKey = (AgentId, AgentId);

/// A selling trader, the deciding agent of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SellerAgent {
    pub id: AgentId,
    pub village_id: u32,
    pub subdistrict_id: u32,
    pub district_id: u32,
    pub gps_s: f64,
    pub gps_e: f64,
    /// Ordinal 1 (never went to school) to 6 (college).
    pub education: u8,
    pub ethnicity: u32,
    /// Transport capacity in kg.
    pub transport: f64,
    pub employees: u32,
    pub prestigious_job: bool,
    pub active_group: bool,
    /// Number of village groups the seller is active in, 0 to 4.
    pub group_count: u8,
    pub age: f64,
    pub house_value: f64,
    // Survey fields carried through I/O; no equation reads them.
    pub hh_size: u32,
    pub hhs_vlg: u32,
    pub income: f64,
    /// Outstanding debt with each creditor buyer.
    pub debt_by_buyer: BTreeMap<AgentId, f64>,
    /// Observed number of buyers; kept equal to the seller's empirical link count.
    pub n_buyer_empirical: u32,
    pub total_sales: f64,
}

impl SellerAgent {
    pub fn debt_with(&self, buyer: AgentId) -> f64 {
        self.debt_by_buyer.get(&buyer).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuyerAgent {
    pub id: AgentId,
    /// Average buying price per kg.
    pub price: f64,
    /// Planar `(gps_s, gps_e)` position, when known.
    pub location: Option<(f64, f64)>,
}

/// A trading link observed in the survey.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalLink {
    pub seller: AgentId,
    pub buyer: AgentId,
    pub tons: f64,
}

/// Square matrix of pairwise agent distances, addressed by id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DistanceMatrix {
    ids: Vec<AgentId>,
    index: BTreeMap<AgentId, usize>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major `values` (`ids.len()²` entries).
    pub fn new(ids: Vec<AgentId>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::InvalidDataset(format!(
                "distance matrix over {n} ids needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(Error::InvalidDataset(format!(
                    "duplicate id {id} in distance matrix"
                )));
            }
        }
        Ok(Self { ids, index, values })
    }

    /// Euclidean distances between planar points.
    pub fn from_points(points: &[(AgentId, f64, f64)]) -> Result<Self> {
        let n = points.len();
        let mut values = Vec::with_capacity(n * n);
        for &(_, ax, ay) in points {
            for &(_, bx, by) in points {
                let (dx, dy) = (ax - bx, ay - by);
                values.push(libm::sqrt(dx * dx + dy * dy));
            }
        }
        Self::new(points.iter().map(|p| p.0).collect(), values)
    }

    pub fn ids(&self) -> &[AgentId] {
        &self.ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, a: AgentId, b: AgentId) -> Option<f64> {
        let i = *self.index.get(&a)?;
        let j = *self.index.get(&b)?;
        Some(self.values[i * self.ids.len() + j])
    }
}

/// The ten calibratable global parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GlobalParams {
    /// Number of incoming social links each seller listens to; rounded half-up at use.
    pub n_social: f64,
    pub w_price: f64,
    pub w_dist: f64,
    pub w_debts: f64,
    pub w_social: f64,
    pub w_s_education: f64,
    pub w_s_ethnicity: f64,
    pub w_s_activegroup: f64,
    pub w_s_prestigious_job: f64,
    pub w_s_proximity: f64,
}

pub const WEIGHT_MIN: f64 = 0.0;
pub const WEIGHT_MAX: f64 = 100.0;

impl GlobalParams {
    /// Weights fitted to the reduced survey sample.
    pub const SURVEY_REDUCED_FIT: Self = Self {
        n_social: 1.61,
        w_price: 3.30,
        w_dist: 12.12,
        w_debts: 64.07,
        w_social: 20.52,
        w_s_education: 5.96,
        w_s_ethnicity: 9.12,
        w_s_activegroup: 9.91,
        w_s_prestigious_job: 0.01,
        w_s_proximity: 75.01,
    };

    /// Weights fitted to the complete survey sample.
    pub const SURVEY_COMPLETE_FIT: Self = Self {
        n_social: 5.12,
        w_price: 0.23,
        w_dist: 1.74,
        w_debts: 94.48,
        w_social: 3.55,
        w_s_education: 31.34,
        w_s_ethnicity: 10.32,
        w_s_activegroup: 14.90,
        w_s_prestigious_job: 2.28,
        w_s_proximity: 41.16,
    };

    pub const NAMES: [&'static str; 10] = [
        "n_social",
        "w_price",
        "w_dist",
        "w_debts",
        "w_social",
        "w_s_education",
        "w_s_ethnicity",
        "w_s_activegroup",
        "w_s_prestigious_job",
        "w_s_proximity",
    ];

    pub fn to_array(&self) -> [f64; 10] {
        [
            self.n_social,
            self.w_price,
            self.w_dist,
            self.w_debts,
            self.w_social,
            self.w_s_education,
            self.w_s_ethnicity,
            self.w_s_activegroup,
            self.w_s_prestigious_job,
            self.w_s_proximity,
        ]
    }

    pub fn from_array(g: [f64; 10]) -> Self {
        Self {
            n_social: g[0],
            w_price: g[1],
            w_dist: g[2],
            w_debts: g[3],
            w_social: g[4],
            w_s_education: g[5],
            w_s_ethnicity: g[6],
            w_s_activegroup: g[7],
            w_s_prestigious_job: g[8],
            w_s_proximity: g[9],
        }
    }

    /// Count of active incoming social links per seller.
    pub fn social_degree(&self) -> usize {
        libm::floor(self.n_social + 0.5) as usize
    }

    pub fn main_weight_sum(&self) -> f64 {
        self.w_price + self.w_dist + self.w_debts + self.w_social
    }

    pub fn social_weight_sum(&self) -> f64 {
        self.w_s_proximity
            + self.w_s_education
            + self.w_s_ethnicity
            + self.w_s_activegroup
            + self.w_s_prestigious_job
    }

    /// Main weights scaled to sum 100 and social-matrix weights scaled to sum
    /// 100 separately. Both weighted means are invariant under this.
    pub fn normalized(&self) -> Self {
        let main = self.main_weight_sum();
        let social = self.social_weight_sum();
        let scale = |w: f64, sum: f64| if sum > 0.0 { 100.0 * w / sum } else { w };
        Self {
            n_social: self.n_social,
            w_price: scale(self.w_price, main),
            w_dist: scale(self.w_dist, main),
            w_debts: scale(self.w_debts, main),
            w_social: scale(self.w_social, main),
            w_s_education: scale(self.w_s_education, social),
            w_s_ethnicity: scale(self.w_s_ethnicity, social),
            w_s_activegroup: scale(self.w_s_activegroup, social),
            w_s_prestigious_job: scale(self.w_s_prestigious_job, social),
            w_s_proximity: scale(self.w_s_proximity, social),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in Self::NAMES.iter().zip(self.to_array()) {
            if !value.is_finite() || !(WEIGHT_MIN..=WEIGHT_MAX).contains(&value) {
                return Err(Error::ParamOutOfRange {
                    name,
                    value,
                    min: WEIGHT_MIN,
                    max: WEIGHT_MAX,
                });
            }
        }
        if self.main_weight_sum() <= 0.0 {
            return Err(Error::ZeroWeights);
        }
        if self.w_social > 0.0 && self.social_degree() > 0 && self.social_weight_sum() <= 0.0 {
            return Err(Error::ZeroSocialWeights);
        }
        Ok(())
    }
}

impl Default for GlobalParams {
    fn default() -> Self {
        Self::SURVEY_REDUCED_FIT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    OutOfRange,
    DuplicateId,
    DanglingLink,
    DuplicateLink,
    NoEmpiricalLink,
    BuyerCountMismatch,
    MissingDistance,
    AsymmetricDistance,
    NegativeDistance,
    NonZeroDiagonal,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::OutOfRange => "out of range",
            Self::DuplicateId => "duplicate id",
            Self::DanglingLink => "dangling link",
            Self::DuplicateLink => "duplicate link",
            Self::NoEmpiricalLink => "no empirical link",
            Self::BuyerCountMismatch => "buyer count mismatch",
            Self::MissingDistance => "missing distance",
            Self::AsymmetricDistance => "asymmetric distance",
            Self::NegativeDistance => "negative distance",
            Self::NonZeroDiagonal => "non-zero diagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The offending agent or link, e.g. `seller 12` or `12 -> 40`.
    pub subject: String,
    pub field: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({}): {}",
            self.kind.label(),
            self.subject,
            self.field,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, subject: String, field: &'static str, detail: String) {
        self.violations.push(Violation {
            kind,
            subject,
            field,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Tolerance for the distance symmetry check.
pub const DISTANCE_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub sellers: Vec<SellerAgent>,
    pub buyers: Vec<BuyerAgent>,
    pub distance: DistanceMatrix,
    pub empirical_links: Vec<EmpiricalLink>,
}

impl Dataset {
    pub fn empirical_set(&self) -> BTreeSet<LinkKey> {
        self.empirical_links
            .iter()
            .map(|l| (l.seller, l.buyer))
            .collect()
    }

    /// Sets every seller's `n_buyer_empirical` to its empirical link count.
    pub fn recount_buyers(&mut self) {
        let mut counts: BTreeMap<AgentId, u32> = BTreeMap::new();
        for link in &self.empirical_links {
            *counts.entry(link.seller).or_default() += 1;
        }
        for seller in &mut self.sellers {
            seller.n_buyer_empirical = counts.get(&seller.id).copied().unwrap_or(0);
        }
    }

    /// Seller–buyer distance: the matrix when it has the pair, else planar
    /// Euclidean distance from the agents' coordinates.
    pub fn seller_buyer_distance(&self, seller: &SellerAgent, buyer: &BuyerAgent) -> Option<f64> {
        if let Some(d) = self.distance.get(seller.id, buyer.id) {
            return Some(d);
        }
        let (bs, be) = buyer.location?;
        let (ds, de) = (seller.gps_s - bs, seller.gps_e - be);
        Some(libm::sqrt(ds * ds + de * de))
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// Collects every invariant violation of `dataset`; empty iff well-formed.
pub fn validate(dataset: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seller_ids = BTreeSet::new();
    let mut buyer_ids = BTreeSet::new();

    for b in &dataset.buyers {
        let subject = format!("buyer {}", b.id);
        if !buyer_ids.insert(b.id) {
            report.push(
                ViolationKind::DuplicateId,
                subject.clone(),
                "id",
                String::from("repeated buyer id"),
            );
        }
        if !(b.price.is_finite() && b.price > 0.0) {
            report.push(
                ViolationKind::OutOfRange,
                subject,
                "price",
                format!("{} is not > 0", b.price),
            );
        }
    }

    for s in &dataset.sellers {
        let subject = format!("seller {}", s.id);
        let mut bad = |field: &'static str, detail: String| {
            report.push(ViolationKind::OutOfRange, subject.clone(), field, detail)
        };
        if !(1..=6).contains(&s.education) {
            bad("education", format!("{} not in 1..=6", s.education));
        }
        if s.group_count > 4 {
            bad("group_count", format!("{} not in 0..=4", s.group_count));
        }
        if !(s.transport.is_finite() && s.transport >= 0.0) {
            bad("transport", format!("{} is not >= 0", s.transport));
        }
        if !(s.age.is_finite() && s.age > 0.0) {
            bad("age", format!("{} is not > 0", s.age));
        }
        if !(s.house_value.is_finite() && s.house_value > 0.0) {
            bad("house_value", format!("{} is not > 0", s.house_value));
        }
        if !(s.total_sales.is_finite() && s.total_sales > 0.0) {
            bad("total_sales", format!("{} is not > 0", s.total_sales));
        }
        if !(s.gps_s.is_finite() && s.gps_e.is_finite()) {
            bad("gps", String::from("coordinates must be finite"));
        }
        for (buyer, debt) in &s.debt_by_buyer {
            if !(debt.is_finite() && *debt >= 0.0) {
                bad(
                    "debts",
                    format!("debt {debt} with buyer {buyer} is not a finite value >= 0"),
                );
            }
        }
        if !seller_ids.insert(s.id) {
            report.push(
                ViolationKind::DuplicateId,
                subject.clone(),
                "id",
                String::from("repeated seller id"),
            );
        }
        if buyer_ids.contains(&s.id) {
            report.push(
                ViolationKind::DuplicateId,
                subject.clone(),
                "id",
                String::from("id also used by a buyer"),
            );
        }
        for buyer in s.debt_by_buyer.keys() {
            if !buyer_ids.contains(buyer) {
                report.push(
                    ViolationKind::DanglingLink,
                    format!("{} -> {}", s.id, buyer),
                    "debts",
                    String::from("debt with unknown buyer"),
                );
            }
        }
    }

    let mut link_keys = BTreeSet::new();
    let mut counts: BTreeMap<AgentId, u32> = BTreeMap::new();
    for link in &dataset.empirical_links {
        let subject = format!("{} -> {}", link.seller, link.buyer);
        if !seller_ids.contains(&link.seller) || !buyer_ids.contains(&link.buyer) {
            report.push(
                ViolationKind::DanglingLink,
                subject.clone(),
                "empirical_links",
                String::from("references an unknown agent"),
            );
        }
        if !link_keys.insert((link.seller, link.buyer)) {
            report.push(
                ViolationKind::DuplicateLink,
                subject,
                "empirical_links",
                String::from("repeated link"),
            );
        }
        *counts.entry(link.seller).or_default() += 1;
    }
    for s in &dataset.sellers {
        let observed = counts.get(&s.id).copied().unwrap_or(0);
        if observed == 0 {
            report.push(
                ViolationKind::NoEmpiricalLink,
                format!("seller {}", s.id),
                "n_buyer_empirical",
                String::from("seller has no empirical trading link"),
            );
        } else if observed != s.n_buyer_empirical {
            report.push(
                ViolationKind::BuyerCountMismatch,
                format!("seller {}", s.id),
                "n_buyer_empirical",
                format!(
                    "{} recorded, {} empirical links",
                    s.n_buyer_empirical, observed
                ),
            );
        }
    }

    let dm = &dataset.distance;
    let n = dm.len();
    for i in 0..n {
        let row = &dm.values[i * n..(i + 1) * n];
        if row[i] != 0.0 {
            report.push(
                ViolationKind::NonZeroDiagonal,
                format!("agent {}", dm.ids[i]),
                "distance",
                format!("d(i,i) = {}", row[i]),
            );
        }
        for (j, &d) in row.iter().enumerate() {
            if !(d.is_finite() && d >= 0.0) {
                report.push(
                    ViolationKind::NegativeDistance,
                    format!("{} -> {}", dm.ids[i], dm.ids[j]),
                    "distance",
                    format!("{d} is not a finite value >= 0"),
                );
            }
            if j > i && libm::fabs(d - dm.values[j * n + i]) > DISTANCE_SYMMETRY_TOL {
                report.push(
                    ViolationKind::AsymmetricDistance,
                    format!("{} -> {}", dm.ids[i], dm.ids[j]),
                    "distance",
                    format!("{} vs {}", d, dm.values[j * n + i]),
                );
            }
        }
    }
    for s in &dataset.sellers {
        for b in &dataset.buyers {
            if dataset.seller_buyer_distance(s, b).is_none() {
                report.push(
                    ViolationKind::MissingDistance,
                    format!("{} -> {}", s.id, b.id),
                    "distance",
                    String::from("no matrix entry and no buyer coordinates"),
                );
            }
        }
    }
    report
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn seller(id: u32) -> SellerAgent {
        SellerAgent {
            id: AgentId(id),
            village_id: 1,
            subdistrict_id: 1,
            district_id: 1,
            gps_s: 0.0,
            gps_e: id as f64,
            education: 3,
            ethnicity: 1,
            transport: 1000.0,
            employees: 2,
            prestigious_job: false,
            active_group: false,
            group_count: 0,
            age: 40.0,
            house_value: 1.0e8,
            hh_size: 4,
            hhs_vlg: 100,
            income: 5.0e7,
            debt_by_buyer: BTreeMap::new(),
            n_buyer_empirical: 1,
            total_sales: 1.0e9,
        }
    }

    pub fn buyer(id: u32, price: f64, x: f64) -> BuyerAgent {
        BuyerAgent {
            id: AgentId(id),
            price,
            location: Some((1.0, x)),
        }
    }

    /// Sellers on a line at (0, id), buyers at (1, x); each seller observed
    /// selling to the first buyer.
    pub fn small_dataset(n_sellers: u32, buyers: &[(f64, f64)]) -> Dataset {
        let sellers: Vec<_> = (1..=n_sellers).map(seller).collect();
        let buyers: Vec<_> = buyers
            .iter()
            .enumerate()
            .map(|(i, &(price, x))| buyer(1000 + i as u32, price, x))
            .collect();
        let empirical_links = sellers
            .iter()
            .map(|s| EmpiricalLink {
                seller: s.id,
                buyer: buyers[0].id,
                tons: 1.0,
            })
            .collect();
        let mut points: Vec<_> = sellers.iter().map(|s| (s.id, s.gps_s, s.gps_e)).collect();
        points.extend(
            buyers
                .iter()
                .map(|b| (b.id, b.location.unwrap().0, b.location.unwrap().1)),
        );
        Dataset {
            sellers,
            buyers,
            distance: DistanceMatrix::from_points(&points).unwrap(),
            empirical_links,
        }
    }

    pub fn two_buyer() -> Dataset {
        small_dataset(3, &[(9000.0, 0.0), (9500.0, 5.0)])
    }
}
