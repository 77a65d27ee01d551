//! DR event identification: dynamic thresholds, the combined DR score, and
//! grouping of candidate hours into duration-constrained events.

use serde::Serialize;
use thiserror::Error;

use crate::config::ModelConfig;
use crate::ingest::{DayProfile, HourSeries, LoadAggregates, LoadClass, HOURS};

/// Which threshold selected an event's hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trigger {
    Price,
    Load,
    Both,
}

/// A contiguous window of hours selected for DR intervention.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrEvent {
    /// First hour, inclusive.
    #[serde(rename = "start")]
    pub start_hour: usize,
    /// Last hour, inclusive.
    #[serde(rename = "end")]
    pub end_hour: usize,
    /// Mean price over the event hours, $/MWh.
    pub avg_price: f64,
    /// Mean total load over the event hours, MW.
    pub avg_load: f64,
    pub trigger: Trigger,
}

impl DrEvent {
    pub fn len(&self) -> usize {
        self.end_hour - self.start_hour + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hours(&self) -> impl Iterator<Item = usize> {
        self.start_hour..=self.end_hour
    }

    pub fn contains(&self, t: usize) -> bool {
        t >= self.start_hour && t <= self.end_hour
    }
}

/// Thresholds, per-hour score, and the candidate mask for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DrSignal {
    /// Price threshold, $/MWh.
    pub pi_th: f64,
    /// Load threshold, MW.
    pub p_th: f64,
    /// Combined DR score per hour (diagnostic; not a selection cutoff).
    pub score: HourSeries,
    pub candidate: [bool; HOURS],
}

#[derive(Debug, Error)]
pub enum DrError {
    #[error("undefined score: {0}")]
    UndefinedScore(String),
}

/// Price and load thresholds: `pi_th = max(beta * pi_bar, pi_base)`,
/// `p_th = gamma * p_peak`.
pub fn thresholds(agg: &LoadAggregates, cfg: &ModelConfig) -> (f64, f64) {
    let pi_th = (cfg.beta * agg.pi_bar).max(cfg.pi_base);
    let p_th = cfg.gamma * agg.p_peak;
    (pi_th, p_th)
}

/// Combined DR score at hour `t`: price and load, each normalized by its
/// daily reference, multiplied together.
pub fn score(agg: &LoadAggregates, t: usize) -> Result<f64, DrError> {
    if agg.pi_bar == 0.0 {
        return Err(DrError::UndefinedScore("mean price is zero".into()));
    }
    if agg.p_peak == 0.0 {
        return Err(DrError::UndefinedScore("peak load is zero".into()));
    }
    Ok((agg.price[t] / agg.pi_bar) * (agg.p_total[t] / agg.p_peak))
}

/// Thresholds plus the per-hour candidate mask. Candidacy is the OR of the
/// two threshold tests.
pub fn signal(agg: &LoadAggregates, cfg: &ModelConfig) -> Result<DrSignal, DrError> {
    let (pi_th, p_th) = thresholds(agg, cfg);
    let mut candidate = [false; HOURS];
    let mut score_series = [0.0; HOURS];
    for t in 0..HOURS {
        score_series[t] = score(agg, t)?;
        candidate[t] = agg.price[t] > pi_th || agg.p_total[t] > p_th;
    }
    Ok(DrSignal {
        pi_th,
        p_th,
        score: score_series,
        candidate,
    })
}

/// Groups candidate hours into events of duration `t_min..=t_max`.
///
/// Maximal consecutive candidate runs shorter than `t_min` are discarded.
/// Longer runs are split left-to-right into chunks of at most `t_max`; when
/// the final remainder would fall below `t_min`, hours are borrowed from the
/// preceding chunk so every emitted event respects both duration bounds. A
/// remainder that cannot be fixed up that way is dropped.
pub fn identify_events(agg: &LoadAggregates, cfg: &ModelConfig) -> Result<Vec<DrEvent>, DrError> {
    let sig = signal(agg, cfg)?;
    let mut events = Vec::new();

    let mut t = 0;
    while t < HOURS {
        if !sig.candidate[t] {
            t += 1;
            continue;
        }
        let start = t;
        while t < HOURS && sig.candidate[t] {
            t += 1;
        }
        let run_len = t - start;
        if run_len < cfg.t_min {
            continue;
        }
        for (chunk_start, chunk_len) in split_run(run_len, cfg.t_min, cfg.t_max) {
            let s = start + chunk_start;
            let e = s + chunk_len - 1;
            events.push(make_event(agg, &sig, s, e));
        }
    }
    Ok(events)
}

/// Splits a run of `len >= t_min` hours into chunk `(offset, len)` pairs,
/// each within `[t_min, t_max]`.
fn split_run(len: usize, t_min: usize, t_max: usize) -> Vec<(usize, usize)> {
    let mut chunks = Vec::new();
    let mut offset = 0;
    let mut rem = len;
    while rem > t_max {
        let take = if rem - t_max >= t_min {
            t_max
        } else if rem >= 2 * t_min {
            // Borrow from this chunk so the remainder reaches t_min.
            rem - t_min
        } else {
            // No split keeps both parts in range; the tail gets dropped.
            t_max
        };
        chunks.push((offset, take));
        offset += take;
        rem -= take;
    }
    if rem >= t_min {
        chunks.push((offset, rem));
    }
    chunks
}

fn make_event(agg: &LoadAggregates, sig: &DrSignal, start: usize, end: usize) -> DrEvent {
    let n = (end - start + 1) as f64;
    let avg_price = (start..=end).map(|h| agg.price[h]).sum::<f64>() / n;
    let avg_load = (start..=end).map(|h| agg.p_total[h]).sum::<f64>() / n;
    let mut any_price = false;
    let mut any_load = false;
    for h in start..=end {
        any_price |= agg.price[h] > sig.pi_th;
        any_load |= agg.p_total[h] > sig.p_th;
    }
    let trigger = match (any_price, any_load) {
        (true, true) => Trigger::Both,
        (true, false) => Trigger::Price,
        _ => Trigger::Load,
    };
    DrEvent {
        start_hour: start,
        end_hour: end,
        avg_price,
        avg_load,
        trigger,
    }
}

/// Total DR capacity at hour `t`: the adjustable slice of flexible load plus
/// the curtailable slice, MW.
pub fn dr_capacity(profile: &DayProfile, cfg: &ModelConfig, t: usize) -> f64 {
    cfg.delta_f * profile.class_demand(LoadClass::Flexible, t)
        + cfg.alpha_max * profile.class_demand(LoadClass::Curtailable, t)
}

/// True when hour `t` falls inside any of `events`.
pub fn in_any_event(events: &[DrEvent], t: usize) -> bool {
    events.iter().any(|e| e.contains(t))
}

/// Events as a JSON array of `{start, end, avg_price, avg_load, trigger}`.
pub fn events_to_json(events: &[DrEvent]) -> String {
    serde_json::to_string_pretty(events).expect("event serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{aggregate, Load};

    /// Aggregates with chosen per-hour price/total-load series.
    fn agg_from(price: HourSeries, load: HourSeries) -> LoadAggregates {
        let profile = DayProfile {
            label: String::new(),
            price,
            loads: vec![Load {
                id: "all".into(),
                class: LoadClass::Flexible,
                demand: load,
            }],
            solar_units: vec![],
        };
        aggregate(&profile)
    }

    fn cfg() -> ModelConfig {
        ModelConfig::standard()
    }

    #[test]
    fn price_threshold_floor_applies() {
        let agg = agg_from([100.0; 24], [0.5; 24]);
        let (pi_th, _) = thresholds(&agg, &cfg());
        assert_eq!(pi_th, 150.0); // 1.2 * 100 = 120 < 150
    }

    #[test]
    fn price_threshold_multiplier_branch() {
        let agg = agg_from([200.0; 24], [0.5; 24]);
        let (pi_th, _) = thresholds(&agg, &cfg());
        assert!((pi_th - 240.0).abs() < 1e-12);
    }

    #[test]
    fn load_threshold_is_gamma_peak() {
        let mut load = [0.5; 24];
        load[18] = 0.70;
        let agg = agg_from([100.0; 24], load);
        let (_, p_th) = thresholds(&agg, &cfg());
        assert!((p_th - 0.56).abs() < 1e-12);
    }

    #[test]
    fn score_normalization_point() {
        let agg = agg_from([100.0; 24], [0.5; 24]);
        // Every hour sits at the mean price and the peak load.
        assert!((score(&agg, 7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn score_product_symmetry() {
        let mut price = [100.0; 24];
        let mut load = [0.5; 24];
        price[3] = 200.0; // 2x mean shifts the mean too, so build it explicitly
        load[3] = 0.25;
        let agg = agg_from(price, load);
        let expect = (price[3] / agg.pi_bar) * (load[3] / agg.p_peak);
        assert!((score(&agg, 3).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn score_worked_example() {
        // price/pi_bar = 1.5, load/peak = 0.8 -> 1.2
        let mut price = [98.0; 24];
        price[5] = 150.0;
        let adjust = (100.0 * 24.0 - price.iter().sum::<f64>()) / 1.0;
        price[6] += adjust; // force pi_bar = 100 exactly
        let mut load = [0.3; 24];
        load[10] = 0.7;
        load[5] = 0.56;
        let agg = agg_from(price, load);
        assert!((agg.pi_bar - 100.0).abs() < 1e-9);
        assert!((score(&agg, 5).unwrap() - 1.2).abs() < 1e-9);
    }

    #[test]
    fn degenerate_score_errors() {
        let mut load = [0.0; 24];
        load[0] = 1.0;
        let agg = agg_from([0.0; 24], load);
        assert!(score(&agg, 0).is_err());
    }

    /// Candidate hours {7,8,9,10,17,18} group into [7-10] and [17-18].
    #[test]
    fn groups_canonical_events() {
        let mut price = [100.0; 24];
        for t in [7, 8, 9, 10, 17, 18] {
            price[t] = 400.0; // far above any pi_th this series produces
        }
        let load = [0.1; 24];
        let agg = agg_from(price, load);
        let events = identify_events(&agg, &cfg()).unwrap();
        // Flat load means the load threshold fires at every hour only if
        // p_total > 0.8 * peak, which holds everywhere on a flat series; use
        // a config with gamma > 1 impossible -- instead check price-only by
        // bumping one hour of load.
        // With flat load every hour is a load candidate; rebuild with a
        // shaped load so only the priced hours are candidates.
        assert!(!events.is_empty());
        drop(events);

        let mut load = [0.1; 24];
        load[2] = 1.0; // isolated peak, run of 1 < t_min
        let agg = agg_from(price, load);
        let events = identify_events(&agg, &cfg()).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!((events[0].start_hour, events[0].end_hour), (7, 10));
        assert_eq!((events[1].start_hour, events[1].end_hour), (17, 18));
        assert_eq!(events[0].trigger, Trigger::Price);
    }

    #[test]
    fn short_runs_discarded() {
        let mut price = [100.0; 24];
        price[5] = 400.0;
        let mut load = [0.1; 24];
        load[2] = 1.0;
        let agg = agg_from(price, load);
        let events = identify_events(&agg, &cfg()).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn long_runs_split() {
        // Candidates {0..=5}: split into [0-3] and [4-5].
        let mut price = [100.0; 24];
        for t in 0..=5 {
            price[t] = 400.0;
        }
        let mut load = [0.1; 24];
        load[12] = 1.0;
        let agg = agg_from(price, load);
        let events = identify_events(&agg, &cfg()).unwrap();
        let spans: Vec<_> = events.iter().map(|e| (e.start_hour, e.end_hour)).collect();
        assert_eq!(spans, vec![(0, 3), (4, 5)]);
    }

    #[test]
    fn split_rebalances_short_tail() {
        // len 5 with [2,4]: greedy 4+1 would strand a 1-hour tail; expect 3+2.
        assert_eq!(split_run(5, 2, 4), vec![(0, 3), (3, 2)]);
        assert_eq!(split_run(6, 2, 4), vec![(0, 4), (4, 2)]);
        assert_eq!(split_run(9, 2, 4), vec![(0, 4), (4, 3), (7, 2)]);
        assert_eq!(split_run(4, 2, 4), vec![(0, 4)]);
        // len 5 with [3,4]: no valid two-chunk split; tail dropped.
        assert_eq!(split_run(5, 3, 4), vec![(0, 4)]);
    }

    #[test]
    fn capacity_sums_flexible_and_curtailable() {
        let profile = DayProfile {
            label: String::new(),
            price: [100.0; 24],
            loads: vec![
                Load {
                    id: "f".into(),
                    class: LoadClass::Flexible,
                    demand: [0.32; 24],
                },
                Load {
                    id: "k".into(),
                    class: LoadClass::Curtailable,
                    demand: [0.32; 24],
                },
                Load {
                    id: "c".into(),
                    class: LoadClass::Critical,
                    demand: [0.11; 24],
                },
            ],
            solar_units: vec![],
        };
        let c = dr_capacity(&profile, &cfg(), 12);
        assert!((c - 0.16).abs() < 1e-12);
    }

    #[test]
    fn capacity_zero_without_adjustable_loads() {
        let profile = DayProfile {
            label: String::new(),
            price: [100.0; 24],
            loads: vec![Load {
                id: "c".into(),
                class: LoadClass::Critical,
                demand: [0.5; 24],
            }],
            solar_units: vec![],
        };
        assert_eq!(dr_capacity(&profile, &cfg(), 0), 0.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_day() -> impl Strategy<Value = (HourSeries, HourSeries)> {
            (
                proptest::array::uniform24(10.0f64..400.0),
                proptest::array::uniform24(0.01f64..2.0),
            )
        }

        proptest! {
            /// Raising one hour's price never removes that hour from the
            /// candidate set.
            #[test]
            fn candidacy_monotone_in_price((price, load) in arb_day(), t in 0usize..24, bump in 1.0f64..200.0) {
                let cfg = cfg();
                let before = signal(&agg_from(price, load), &cfg).unwrap();
                let mut price2 = price;
                price2[t] += bump;
                let after = signal(&agg_from(price2, load), &cfg).unwrap();
                prop_assert!(!before.candidate[t] || after.candidate[t]);
            }

            /// Every event hour is a candidate, and event hour-sets are
            /// pairwise disjoint with lengths inside [t_min, t_max].
            #[test]
            fn events_cover_only_candidates((price, load) in arb_day()) {
                let cfg = cfg();
                let agg = agg_from(price, load);
                let sig = signal(&agg, &cfg).unwrap();
                let events = identify_events(&agg, &cfg).unwrap();
                let mut used = [false; 24];
                let mut total = 0;
                for e in &events {
                    prop_assert!(e.len() >= cfg.t_min && e.len() <= cfg.t_max);
                    for h in e.hours() {
                        prop_assert!(sig.candidate[h], "event hour {h} is not a candidate");
                        prop_assert!(!used[h], "hour {h} appears in two events");
                        used[h] = true;
                        total += 1;
                    }
                }
                prop_assert_eq!(total, events.iter().map(|e| e.len()).sum::<usize>());
            }

            /// Scaling prices by k > 0 leaves the score unchanged, and leaves
            /// price-candidacy unchanged while the multiplier branch is the
            /// active one both before and after.
            #[test]
            fn price_scaling_invariance((price, load) in arb_day(), k in 0.5f64..4.0) {
                let cfg = cfg();
                let agg = agg_from(price, load);
                let mut scaled_price = price;
                for p in &mut scaled_price {
                    *p *= k;
                }
                let agg2 = agg_from(scaled_price, load);
                for t in 0..24 {
                    let s1 = score(&agg, t).unwrap();
                    let s2 = score(&agg2, t).unwrap();
                    prop_assert!((s1 - s2).abs() < 1e-9 * s1.abs().max(1.0));
                }
                let mult_active_before = cfg.beta * agg.pi_bar >= cfg.pi_base;
                let mult_active_after = cfg.beta * agg2.pi_bar >= cfg.pi_base;
                if mult_active_before && mult_active_after {
                    let s1 = signal(&agg, &cfg).unwrap();
                    let s2 = signal(&agg2, &cfg).unwrap();
                    for t in 0..24 {
                        let price_fired_1 = agg.price[t] > s1.pi_th;
                        let price_fired_2 = agg2.price[t] > s2.pi_th;
                        prop_assert_eq!(price_fired_1, price_fired_2);
                    }
                }
            }
        }
    }
}
