use std::collections::BTreeMap;

use tradenet_core::{AgentId, BuyerAgent, Dataset, DistanceMatrix, EmpiricalLink, SellerAgent};

pub fn seller(id: u32, x: f64) -> SellerAgent {
    SellerAgent {
        id: AgentId(id),
        village_id: 1,
        subdistrict_id: 1,
        district_id: 1,
        gps_s: 0.0,
        gps_e: x,
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

/// Sellers at (0, i), buyers at `(price, (s, e))`; every seller observed
/// selling to the first buyer.
pub fn dataset(n_sellers: u32, buyers: &[(f64, (f64, f64))]) -> Dataset {
    let sellers: Vec<_> = (1..=n_sellers).map(|i| seller(i, i as f64)).collect();
    let buyers: Vec<_> = buyers
        .iter()
        .enumerate()
        .map(|(j, &(price, location))| BuyerAgent {
            id: AgentId(100 + j as u32),
            price,
            location: Some(location),
        })
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
    let mut ds = Dataset {
        sellers,
        buyers,
        distance: DistanceMatrix::from_points(&points).unwrap(),
        empirical_links,
    };
    ds.recount_buyers();
    ds
}
