use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use tradenet::dataio::{load_dir, reduced_sample, save_dataset, DataError};
use tradenet::{gen_sellers, gen_synthetic, SyntheticConfig};
use tradenet_core::calibration::evaluate;
use tradenet_core::{AgentId, Model, ModelConfig};

const SELLER_HEADER: &str = "id,village_id,subdistrict_id,district_id,gps_s,gps_e,education,ethnicity,transport,employees,prestigious_job,active_group,group_count,age,house_value,hh_size,hhs_vlg,income,total_sales";

fn seller_row(id: u32, s: f64, e: f64) -> String {
    format!("{id},1,1,1,{s},{e},3,2,1500,4,0,1,2,41,120000000,5,300,60000000,800000000")
}

/// Three sellers, buyers 10 and 11 located, distances from coordinates.
fn write_small(dir: &Path, links: &str) {
    let sellers: Vec<String> = [(1, 0.0, 0.0), (2, 0.0, 3.0), (3, 4.0, 0.0)]
        .iter()
        .map(|&(id, s, e)| seller_row(id, s, e))
        .collect();
    fs::write(
        dir.join("sellers.csv"),
        format!("{SELLER_HEADER}\n{}\n", sellers.join("\n")),
    )
    .unwrap();
    fs::write(
        dir.join("buyers.csv"),
        "id,price,gps_s,gps_e\n10,9000,1,1\n11,9400,3,4\n",
    )
    .unwrap();
    fs::write(dir.join("links.csv"), links).unwrap();
}

const LINKS: &str = "seller_id,buyer_id,debts,tons\n1,10,5,2.5\n2,10,0,1\n3,11,0,4\n3,10,0,1\n";

fn load_err(dir: &Path) -> String {
    match load_dir(dir) {
        Ok(_) => panic!("expected a load error"),
        Err(e) => e.to_string(),
    }
}

#[test]
fn loads_and_computes_euclidean_distances() {
    let dir = tempfile::tempdir().unwrap();
    write_small(dir.path(), LINKS);
    let ds = load_dir(dir.path()).unwrap();
    assert_eq!(ds.sellers.len(), 3);
    assert_eq!(ds.sellers[0].debt_with(AgentId(10)), 5.0);
    assert!(ds.sellers[1].debt_by_buyer.is_empty());
    assert_eq!(ds.sellers[2].n_buyer_empirical, 2);
    assert!(ds.sellers[0].active_group && !ds.sellers[0].prestigious_job);
    let d = ds
        .seller_buyer_distance(&ds.sellers[1], &ds.buyers[1])
        .unwrap();
    assert_eq!(d, (3.0f64 * 3.0 + 1.0 * 1.0).sqrt());
}

#[test]
fn unknown_buyer_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    write_small(
        dir.path(),
        "seller_id,buyer_id,debts,tons\n1,10,0,1\n2,99,0,1\n",
    );
    let msg = load_err(dir.path());
    assert!(
        msg.contains("line 3") && msg.contains("unknown buyer id 99"),
        "{msg}"
    );
}

#[test]
fn missing_column_and_bad_number() {
    let dir = tempfile::tempdir().unwrap();
    write_small(dir.path(), LINKS);
    fs::write(dir.path().join("buyers.csv"), "id,cost\n10,9000\n11,9400\n").unwrap();
    let msg = load_err(dir.path());
    assert!(msg.contains("missing column \"price\""), "{msg}");

    fs::write(
        dir.path().join("buyers.csv"),
        "id,price\n10,9000\n11,lots\n",
    )
    .unwrap();
    let msg = load_err(dir.path());
    assert!(msg.contains("line 3") && msg.contains("price"), "{msg}");
}

#[test]
fn asymmetric_matrix_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    write_small(dir.path(), LINKS);
    let ids = [1, 2, 3, 10, 11];
    let mut text = String::from("id,1,2,3,10,11\n");
    for (i, id) in ids.iter().enumerate() {
        let row: Vec<String> = (0..5)
            .map(|j| {
                let d = (i as f64 - j as f64).abs();
                if (i, j) == (4, 1) {
                    "9".into()
                } else {
                    d.to_string()
                }
            })
            .collect();
        text.push_str(&format!("{id},{}\n", row.join(",")));
    }
    fs::write(dir.path().join("distances.csv"), text).unwrap();
    let msg = load_err(dir.path());
    assert!(
        msg.contains("line 6") && msg.contains("asymmetric"),
        "{msg}"
    );
}

#[test]
fn validation_failures_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    write_small(
        dir.path(),
        "seller_id,buyer_id,debts,tons\n1,10,-3,1\n1,10,0,1\n",
    );
    match load_dir(dir.path()) {
        Err(DataError::Invalid(report)) => assert!(report.violations.len() >= 3, "{report}"),
        other => panic!("expected a validation report, got {other:?}"),
    }
}

#[test]
fn round_trip_is_byte_identical() {
    let (ds, _) = gen_synthetic(&SyntheticConfig {
        seed: 5,
        ..Default::default()
    })
    .unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    save_dataset(&ds, a.path()).unwrap();
    let loaded = load_dir(a.path()).unwrap();
    assert_eq!(loaded, ds);
    save_dataset(&loaded, b.path()).unwrap();
    for name in ["sellers.csv", "buyers.csv", "links.csv", "distances.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn off_link_debts_survive_the_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_small(dir.path(), LINKS);
    let mut ds = load_dir(dir.path()).unwrap();
    ds.sellers[1].debt_by_buyer.insert(AgentId(11), 7.5);
    save_dataset(&ds, dir.path()).unwrap();
    assert!(dir.path().join("debts.csv").exists());
    assert_eq!(load_dir(dir.path()).unwrap(), ds);
}

#[test]
fn reduced_sample_drops_single_seller_buyers() {
    let dir = tempfile::tempdir().unwrap();
    write_small(dir.path(), LINKS);
    let ds = load_dir(dir.path()).unwrap();
    let reduced = reduced_sample(&ds).unwrap();
    assert_eq!(reduced.buyers.len(), 1);
    assert_eq!(reduced.empirical_links.len(), 3);
    assert_eq!(reduced.sellers.len(), 3);
    assert_eq!(reduced.sellers[2].n_buyer_empirical, 1);
    assert_eq!(reduced_sample(&reduced).unwrap(), reduced);
}

#[test]
fn reduced_sample_without_buyers_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    write_small(
        dir.path(),
        "seller_id,buyer_id,debts,tons\n1,10,0,1\n2,11,0,1\n",
    );
    let two = format!(
        "{SELLER_HEADER}\n{}\n{}\n",
        seller_row(1, 0.0, 0.0),
        seller_row(2, 0.0, 3.0)
    );
    fs::write(dir.path().join("sellers.csv"), two).unwrap();
    let ds = load_dir(dir.path()).unwrap();
    assert!(reduced_sample(&ds).is_err());
}

#[test]
fn reduced_sample_matches_an_independent_tally() {
    let (ds, _) = gen_synthetic(&SyntheticConfig::default()).unwrap();
    let mut tally: BTreeMap<AgentId, usize> = BTreeMap::new();
    for l in &ds.empirical_links {
        *tally.entry(l.buyer).or_default() += 1;
    }
    let singles = tally.values().filter(|&&c| c == 1).count();
    let reduced = reduced_sample(&ds).unwrap();
    assert_eq!(reduced.buyers.len(), ds.buyers.len() - singles);
    assert_eq!(
        reduced.empirical_links.len(),
        ds.empirical_links.len() - singles
    );
}

#[test]
fn generator_is_deterministic_and_self_consistent() {
    let config = SyntheticConfig {
        seed: 17,
        ..Default::default()
    };
    let (a, truth) = gen_synthetic(&config).unwrap();
    let (b, _) = gen_synthetic(&config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.sellers.len(), 179);
    assert!(a.validate().is_empty(), "{}", a.validate());
    let model = Model::new(&a, ModelConfig::default()).unwrap();
    assert_eq!(evaluate(&model, &truth.params, truth.seed, 1), 1.0);
}

#[test]
fn infeasible_configurations_are_rejected() {
    let more_villages = SyntheticConfig {
        n_sellers: 10,
        n_villages: 11,
        ..Default::default()
    };
    assert!(gen_synthetic(&more_villages).is_err());
    let bad_freq = SyntheticConfig {
        ethnicity_freq: vec![0.5, 0.6],
        ..Default::default()
    };
    assert!(gen_synthetic(&bad_freq).is_err());
}

#[test]
fn marginals_follow_the_survey_tables() {
    let config = SyntheticConfig {
        n_sellers: 10_000,
        n_villages: 400,
        seed: 3,
        ..Default::default()
    };
    let sellers = gen_sellers(&config).unwrap();
    let n = sellers.len() as f64;
    let share = |f: &dyn Fn(&tradenet_core::SellerAgent) -> bool| {
        sellers.iter().filter(|s| f(s)).count() as f64 / n
    };

    let table_ethnicity = [39.66, 52.51, 2.79, 1.68, 3.35];
    for (g, pct) in table_ethnicity.iter().enumerate() {
        let got = 100.0 * share(&|s| s.ethnicity == g as u32 + 1);
        assert!(
            (got - pct).abs() <= 1.5,
            "ethnicity {}: {got} vs {pct}",
            g + 1
        );
    }

    // Chi-square over the six education levels; 20.52 is the 0.1% critical
    // value with 5 degrees of freedom.
    let table_education = [2.23, 10.61, 30.17, 18.44, 2.23, 36.31];
    let total: f64 = table_education.iter().sum();
    let chi2: f64 = table_education
        .iter()
        .enumerate()
        .map(|(level, pct)| {
            let expected = n * pct / total;
            let observed = sellers
                .iter()
                .filter(|s| s.education as usize == level + 1)
                .count() as f64;
            (observed - expected).powi(2) / expected
        })
        .sum();
    assert!(chi2 < 20.52, "chi-square {chi2}");

    assert!((share(&|s| s.prestigious_job) - 0.06).abs() < 0.01);
    assert!((share(&|s| s.active_group) - 0.3911).abs() < 0.015);
    assert!(sellers.iter().all(|s| s.transport >= 0.0));
    assert!(sellers
        .iter()
        .all(|s| s.active_group == (s.group_count > 0)));
}
