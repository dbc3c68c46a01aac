mod common;

use tradenet_core::{GlobalParams, Model, ModelConfig};

fn no_feedback() -> GlobalParams {
    GlobalParams {
        n_social: 0.0,
        w_price: 10.0,
        w_dist: 13.0,
        w_debts: 10.0,
        w_social: 0.0,
        ..GlobalParams::default()
    }
}

#[test]
fn exact_ties_redrawn_every_iteration_are_flagged_not_fatal() {
    let ds = common::dataset(3, &[(9000.0, (1.0, 2.0)), (9000.0, (1.0, 2.0))]);
    let config = ModelConfig {
        max_iter: 5,
        ..ModelConfig::default()
    };
    let model = Model::new(&ds, config).unwrap();
    let reports: Vec<_> = (0..64)
        .map(|seed| model.run(&no_feedback(), seed).unwrap())
        .collect();
    let stuck: Vec<_> = reports.iter().filter(|r| !r.converged).collect();
    assert!(!stuck.is_empty());
    assert!(stuck.iter().all(|r| r.iterations_used == 5));
    assert!(stuck.iter().all(|r| r.active_links.len() == 3));
    assert!(stuck.iter().any(|r| r.cycle_detected));
    assert!(reports.iter().any(|r| r.converged && r.iterations_used < 5));
}

#[test]
fn distinct_scores_converge_immediately() {
    let ds = common::dataset(
        5,
        &[
            (9000.0, (1.0, 2.0)),
            (9400.0, (1.0, 4.0)),
            (9100.0, (3.0, 1.0)),
        ],
    );
    let model = Model::new(&ds, ModelConfig::default()).unwrap();
    for seed in 0..10 {
        let r = model.run(&no_feedback(), seed).unwrap();
        assert!(r.converged && !r.cycle_detected, "{r:?}");
        assert_eq!(r.iterations_used, 2);
    }
}

#[test]
fn survey_fit_parameters_converge() {
    let ds = common::dataset(
        12,
        &[
            (9000.0, (1.0, 2.0)),
            (9400.0, (1.0, 8.0)),
            (9100.0, (3.0, 5.0)),
        ],
    );
    let model = Model::new(&ds, ModelConfig::default()).unwrap();
    for params in [
        GlobalParams::SURVEY_REDUCED_FIT,
        GlobalParams::SURVEY_COMPLETE_FIT,
    ] {
        let r = model.run(&params, 3).unwrap();
        assert!(
            r.converged,
            "{params:?} needed {} iterations",
            r.iterations_used
        );
    }
}
