//! Score arithmetic: sub-score normalization, individual weight preferences,
//! the preliminary and final trading scores and the social link score.
//!
//! Every score is a weighted mean of sub-scores in `[0, 1]`, so it stays in
//! `[0, 1]` and is unchanged when all weights are multiplied by one positive
//! factor.

use alloc::vec::Vec;

use crate::domain::{GlobalParams, SellerAgent};
use crate::{Error, Result};

/// Individual multipliers of the global weights, each in `[1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preferences {
    pub price: f64,
    pub dist: f64,
    pub debts: f64,
    pub social: f64,
}

impl Preferences {
    pub const NEUTRAL: Self = Self {
        price: 1.0,
        dist: 1.0,
        debts: 1.0,
        social: 1.0,
    };
}

/// Maps raw preference values onto `[1, 2]` by population min-max.
/// A constant criterion maps to 1 everywhere.
fn spread_one_to_two(raw: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let (min, max) = min_max(raw);
    raw.iter().map(move |&r| {
        if max > min {
            1.0 + (r - min) / (max - min)
        } else {
            1.0
        }
    })
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Derives each seller's weight preferences from transport capacity
/// (distance), house value (price) and age (debts and social): the lower
/// the attribute, the stronger the preference.
pub fn compute_preferences(sellers: &[SellerAgent]) -> Result<Vec<Preferences>> {
    if sellers.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    // Zero capacity is floored at the smallest positive capacity seen.
    let floor = sellers
        .iter()
        .map(|s| s.transport)
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1.0 };

    let raw_dist: Vec<f64> = sellers
        .iter()
        .map(|s| 1.0 / s.transport.max(floor))
        .collect();
    let raw_price: Vec<f64> = sellers.iter().map(|s| 1.0 / s.house_value).collect();
    let raw_age: Vec<f64> = sellers.iter().map(|s| 1.0 / s.age).collect();

    let prefs = spread_one_to_two(&raw_price)
        .zip(spread_one_to_two(&raw_dist))
        .zip(spread_one_to_two(&raw_age))
        .map(|((price, dist), age)| Preferences {
            price,
            dist,
            debts: age,
            social: age,
        })
        .collect();
    Ok(prefs)
}

/// Min-max rescaling onto `[0, 1]`. With `inverted` the largest input maps
/// to 0 and the smallest to 1. Constant input maps to 0.5.
pub fn normalize_subscores(values: &[f64], inverted: bool) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let mut out = values.to_vec();
    normalize_in_place(&mut out, inverted);
    Ok(out)
}

pub(crate) fn normalize_in_place(values: &mut [f64], inverted: bool) {
    let (min, max) = min_max(values);
    let span = max - min;
    for v in values.iter_mut() {
        *v = if span > 0.0 {
            if inverted {
                (max - *v) / span
            } else {
                (*v - min) / span
            }
        } else {
            0.5
        };
    }
}

/// Static criterion sub-scores of one trading link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubScores {
    pub price: f64,
    pub dist: f64,
    pub debts: f64,
}

/// Global weights multiplied by one seller's preferences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveWeights {
    pub price: f64,
    pub dist: f64,
    pub debts: f64,
    pub social: f64,
}

impl EffectiveWeights {
    pub fn new(w: &GlobalParams, pref: &Preferences) -> Self {
        Self {
            price: w.w_price * pref.price,
            dist: w.w_dist * pref.dist,
            debts: w.w_debts * pref.debts,
            social: w.w_social * pref.social,
        }
    }

    pub fn static_sum(&self) -> f64 {
        self.price + self.dist + self.debts
    }

    pub fn total_sum(&self) -> f64 {
        self.static_sum() + self.social
    }

    fn static_numerator(&self, s: SubScores) -> f64 {
        s.price * self.price + s.dist * self.dist + s.debts * self.debts
    }

    /// Weighted mean of the static sub-scores. Caller guarantees
    /// `static_sum() > 0`.
    pub(crate) fn preliminary_unchecked(&self, s: SubScores) -> f64 {
        self.static_numerator(s) / self.static_sum()
    }

    /// Weighted mean of all four sub-scores. Caller guarantees
    /// `total_sum() > 0`. With zero social weight the extra terms add an
    /// exact zero, so this equals [`Self::preliminary_unchecked`] bit for bit.
    pub(crate) fn final_unchecked(&self, s: SubScores, social: f64) -> f64 {
        (self.static_numerator(s) + social * self.social) / (self.static_sum() + self.social)
    }
}

/// Preliminary trading score from the price, distance and debts sub-scores.
pub fn preliminary_score(s: SubScores, w: &GlobalParams, pref: &Preferences) -> Result<f64> {
    let e = EffectiveWeights::new(w, pref);
    if !(e.static_sum() > 0.0) {
        return Err(Error::ZeroWeights);
    }
    Ok(e.preliminary_unchecked(s))
}

/// Final trading score including the social sub-score.
pub fn final_score(s: SubScores, social: f64, w: &GlobalParams, pref: &Preferences) -> Result<f64> {
    let e = EffectiveWeights::new(w, pref);
    if !(e.total_sum() > 0.0) {
        return Err(Error::ZeroWeights);
    }
    Ok(e.final_unchecked(s, social))
}

/// Similarity criteria describing the influence of seller A on seller B.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SocialCriteria {
    pub proximity: f64,
    pub education: f64,
    pub ethnicity: f64,
    pub activegroup: f64,
    pub prestigious_job: f64,
}

const EDUCATION_LEVELS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
const GROUP_LEVELS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Compares influencer `a` with influenced `b`. Education, group activity
/// and job describe `a` alone; proximity and ethnicity compare the pair.
pub fn social_criteria(a: &SellerAgent, b: &SellerAgent) -> SocialCriteria {
    let proximity = if a.district_id != b.district_id {
        0.0
    } else if a.subdistrict_id != b.subdistrict_id {
        0.33
    } else if a.village_id != b.village_id {
        0.66
    } else {
        1.0
    };
    let education = EDUCATION_LEVELS[usize::from(a.education.clamp(1, 6)) - 1];
    let activegroup = GROUP_LEVELS[usize::from(a.group_count.min(4))];
    SocialCriteria {
        proximity,
        education,
        ethnicity: if a.ethnicity == b.ethnicity { 1.0 } else { 0.0 },
        activegroup,
        prestigious_job: if a.prestigious_job { 1.0 } else { 0.0 },
    }
}

/// Weighted mean of the social criteria under the social-matrix weights.
pub fn social_link_score(c: &SocialCriteria, w: &GlobalParams) -> Result<f64> {
    let sum = w.social_weight_sum();
    if !(sum > 0.0) {
        return Err(Error::ZeroSocialWeights);
    }
    let numerator = c.proximity * w.w_s_proximity
        + c.education * w.w_s_education
        + c.ethnicity * w.w_s_ethnicity
        + c.activegroup * w.w_s_activegroup
        + c.prestigious_job * w.w_s_prestigious_job;
    Ok(numerator / sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::seller;
    use alloc::vec;
    use proptest::prelude::*;

    fn unit_weights() -> GlobalParams {
        GlobalParams {
            n_social: 0.0,
            w_price: 1.0,
            w_dist: 1.0,
            w_debts: 1.0,
            w_social: 1.0,
            w_s_education: 1.0,
            w_s_ethnicity: 1.0,
            w_s_activegroup: 1.0,
            w_s_prestigious_job: 1.0,
            w_s_proximity: 1.0,
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn transport_preferences_two_sellers() {
        let mut a = seller(1);
        let mut b = seller(2);
        a.transport = 1000.0;
        b.transport = 2000.0;
        let p = compute_preferences(&[a, b]).unwrap();
        assert_eq!([p[0].dist, p[1].dist], [2.0, 1.0]);
    }

    #[test]
    fn transport_preferences_three_sellers() {
        let sellers: Vec<_> = [1000.0, 2000.0, 4000.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut s = seller(i as u32 + 1);
                s.transport = t;
                s
            })
            .collect();
        let p = compute_preferences(&sellers).unwrap();
        assert!(close(p[0].dist, 2.0));
        assert!(close(p[1].dist, 4.0 / 3.0));
        assert!(close(p[2].dist, 1.0));
    }

    #[test]
    fn zero_transport_uses_smallest_positive_capacity() {
        let mut sellers = vec![seller(1), seller(2), seller(3)];
        sellers[0].transport = 0.0;
        sellers[1].transport = 500.0;
        sellers[2].transport = 1000.0;
        let p = compute_preferences(&sellers).unwrap();
        assert_eq!(p[0].dist, 2.0);
        assert_eq!(p[1].dist, 2.0);
        assert_eq!(p[2].dist, 1.0);
    }

    #[test]
    fn homogeneous_age_gives_unit_preferences() {
        let sellers = vec![seller(1), seller(2), seller(3)];
        for p in compute_preferences(&sellers).unwrap() {
            assert_eq!(p.debts, 1.0);
            assert_eq!(p.social, 1.0);
        }
    }

    #[test]
    fn empty_population_is_an_error() {
        assert_eq!(compute_preferences(&[]), Err(Error::EmptyPopulation));
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(
            normalize_subscores(&[10.0, 20.0, 30.0], false).unwrap(),
            [0.0, 0.5, 1.0]
        );
        assert_eq!(
            normalize_subscores(&[10.0, 20.0, 30.0], true).unwrap(),
            [1.0, 0.5, 0.0]
        );
        for inverted in [false, true] {
            assert_eq!(
                normalize_subscores(&[7.0, 7.0, 7.0], inverted).unwrap(),
                [0.5; 3]
            );
        }
        assert_eq!(normalize_subscores(&[], false), Err(Error::EmptyValues));
    }

    #[test]
    fn preliminary_examples() {
        let w = unit_weights();
        let pref = Preferences::NEUTRAL;
        let half = SubScores {
            price: 0.5,
            dist: 0.5,
            debts: 0.5,
        };
        assert!(close(
            preliminary_score(half, &GlobalParams::default(), &pref).unwrap(),
            0.5
        ));
        let s = SubScores {
            price: 1.0,
            dist: 0.0,
            debts: 0.0,
        };
        assert!(close(preliminary_score(s, &w, &pref).unwrap(), 1.0 / 3.0));

        let mut single = w;
        single.w_price = 5.0;
        single.w_dist = 0.0;
        single.w_debts = 0.0;
        let s = SubScores {
            price: 0.37,
            dist: 0.9,
            debts: 0.1,
        };
        let pref = Preferences {
            price: 1.7,
            dist: 1.2,
            debts: 1.9,
            social: 1.0,
        };
        assert_eq!(preliminary_score(s, &single, &pref).unwrap(), 0.37);

        let mut zero = w;
        zero.w_price = 0.0;
        zero.w_dist = 0.0;
        zero.w_debts = 0.0;
        assert_eq!(preliminary_score(s, &zero, &pref), Err(Error::ZeroWeights));
    }

    #[test]
    fn final_score_examples() {
        let w = unit_weights();
        let pref = Preferences::NEUTRAL;
        let zero = SubScores {
            price: 0.0,
            dist: 0.0,
            debts: 0.0,
        };
        assert!(close(final_score(zero, 1.0, &w, &pref).unwrap(), 0.25));
        let half = SubScores {
            price: 0.5,
            dist: 0.5,
            debts: 0.5,
        };
        assert!(close(
            final_score(half, 0.5, &GlobalParams::default(), &pref).unwrap(),
            0.5
        ));

        let no_social = GlobalParams {
            w_social: 0.0,
            ..GlobalParams::default()
        };
        let s = SubScores {
            price: 0.3,
            dist: 0.8,
            debts: 0.15,
        };
        let pref = Preferences {
            price: 1.3,
            dist: 1.1,
            debts: 1.8,
            social: 1.5,
        };
        assert_eq!(
            final_score(s, 0.9, &no_social, &pref).unwrap().to_bits(),
            preliminary_score(s, &no_social, &pref).unwrap().to_bits()
        );

        let all_zero = GlobalParams::from_array([0.0; 10]);
        assert_eq!(
            final_score(s, 0.9, &all_zero, &pref),
            Err(Error::ZeroWeights)
        );
    }

    #[test]
    fn social_criteria_ladders() {
        let a = seller(1);
        let mut b = seller(2);
        b.subdistrict_id = 2;
        b.village_id = 9;
        assert_eq!(social_criteria(&a, &b).proximity, 0.33);
        b.subdistrict_id = a.subdistrict_id;
        assert_eq!(social_criteria(&a, &b).proximity, 0.66);
        b.village_id = a.village_id;
        assert_eq!(social_criteria(&a, &b).proximity, 1.0);
        b.district_id = 4;
        assert_eq!(social_criteria(&a, &b).proximity, 0.0);

        let mut a = seller(1);
        for (level, expected) in [(1, 0.0), (2, 0.2), (3, 0.4), (4, 0.6), (5, 0.8), (6, 1.0)] {
            a.education = level;
            assert_eq!(social_criteria(&a, &b).education, expected);
        }
        for (groups, expected) in [(0, 0.0), (1, 0.25), (2, 0.5), (3, 0.75), (4, 1.0)] {
            a.group_count = groups;
            assert_eq!(social_criteria(&a, &b).activegroup, expected);
        }
        a.prestigious_job = true;
        b.ethnicity = a.ethnicity + 1;
        let c = social_criteria(&a, &b);
        assert_eq!((c.prestigious_job, c.ethnicity), (1.0, 0.0));
        // Only A's attributes count for the directional criteria.
        let reverse = social_criteria(&b, &a);
        assert_eq!((reverse.prestigious_job, reverse.activegroup), (0.0, 0.0));
    }

    #[test]
    fn social_link_score_examples() {
        let all = SocialCriteria {
            proximity: 1.0,
            education: 1.0,
            ethnicity: 1.0,
            activegroup: 1.0,
            prestigious_job: 1.0,
        };
        let w = GlobalParams::SURVEY_REDUCED_FIT;
        assert!(close(social_link_score(&all, &w).unwrap(), 1.0));
        assert_eq!(
            social_link_score(&SocialCriteria::default(), &w).unwrap(),
            0.0
        );

        let prox = SocialCriteria {
            proximity: 1.0,
            ..SocialCriteria::default()
        };
        let s = social_link_score(&prox, &w).unwrap();
        assert!(close(s, 75.01 / 100.01));
        assert!((s - 0.75003).abs() < 1e-5);

        let mut zero = w;
        zero.w_s_education = 0.0;
        zero.w_s_ethnicity = 0.0;
        zero.w_s_activegroup = 0.0;
        zero.w_s_prestigious_job = 0.0;
        zero.w_s_proximity = 0.0;
        assert_eq!(
            social_link_score(&all, &zero),
            Err(Error::ZeroSocialWeights)
        );
    }

    fn unit() -> impl Strategy<Value = f64> {
        0.0..=1.0f64
    }

    fn weight() -> impl Strategy<Value = f64> {
        0.0..=100.0f64
    }

    fn pref() -> impl Strategy<Value = f64> {
        1.0..=2.0f64
    }

    proptest! {
        #[test]
        fn scores_stay_in_unit_interval(
            s in (unit(), unit(), unit(), unit()),
            w in (weight(), weight(), weight(), weight()),
            p in (pref(), pref(), pref(), pref()),
        ) {
            prop_assume!(w.0 + w.1 + w.2 > 0.0);
            let mut g = GlobalParams::default();
            (g.w_price, g.w_dist, g.w_debts, g.w_social) = w;
            let pref = Preferences { price: p.0, dist: p.1, debts: p.2, social: p.3 };
            let sub = SubScores { price: s.0, dist: s.1, debts: s.2 };
            let pre = preliminary_score(sub, &g, &pref).unwrap();
            let fin = final_score(sub, s.3, &g, &pref).unwrap();
            prop_assert!((0.0..=1.0).contains(&pre));
            prop_assert!((0.0..=1.0).contains(&fin));
        }

        #[test]
        fn increasing_a_subscore_never_lowers_the_score(
            s in (unit(), unit(), unit(), unit()),
            bump in unit(),
            w in (weight(), weight(), weight(), weight()),
            which in 0usize..4,
        ) {
            prop_assume!(w.0 + w.1 + w.2 + w.3 > 0.0);
            let mut g = GlobalParams::default();
            (g.w_price, g.w_dist, g.w_debts, g.w_social) = w;
            let pref = Preferences::NEUTRAL;
            let mut v = [s.0, s.1, s.2, s.3];
            let score = |v: [f64; 4]| {
                final_score(SubScores { price: v[0], dist: v[1], debts: v[2] }, v[3], &g, &pref).unwrap()
            };
            let before = score(v);
            v[which] = (v[which] + bump).min(1.0);
            prop_assert!(score(v) >= before);
        }

        #[test]
        fn social_score_in_unit_interval(
            c in (unit(), unit(), unit(), unit(), unit()),
            w in (weight(), weight(), weight(), weight(), weight()),
        ) {
            prop_assume!(w.0 + w.1 + w.2 + w.3 + w.4 > 0.0);
            let mut g = GlobalParams::default();
            (g.w_s_proximity, g.w_s_education, g.w_s_ethnicity, g.w_s_activegroup, g.w_s_prestigious_job) = w;
            let c = SocialCriteria { proximity: c.0, education: c.1, ethnicity: c.2, activegroup: c.3, prestigious_job: c.4 };
            let v = social_link_score(&c, &g).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
