//! Day-to-day learning: recency-weighted blending of observed loads, denial
//! rates and event times, arrival-time samples for delay risk, and the repair
//! that keeps learned trip times non-decreasing.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::network::{EventId, EventKind, Network, Time, TripId};
use crate::ptt::{ChangedKeys, CostView};

/// old·(1 − n^−κ) + obs·n^−κ, with `n` already counting this update. Written
/// as a correction of `old` so that repeating an observation leaves it unchanged.
#[inline]
pub fn blend(old: f64, obs: f64, n: u32, kappa: f64) -> f64 {
    let w = (n as f64).powf(-kappa);
    old + (obs - old) * w
}

/// w_i^d = i^−κ · Π_{j=i+1..d} (1 − j^−κ) for i = 1..d.
pub fn sample_weights(d: usize, kappa: f64) -> Vec<f64> {
    let mut w = vec![0.0; d];
    let mut tail = 1.0;
    for i in (1..=d).rev() {
        w[i - 1] = (i as f64).powf(-kappa) * tail;
        tail *= 1.0 - (i as f64).powf(-kappa);
    }
    w
}

/// Precomputed weights for every sample count up to the window size.
#[derive(Clone, Debug)]
pub struct WeightTable {
    rows: Vec<Vec<f64>>,
}

impl WeightTable {
    pub fn new(window: usize, kappa: f64) -> Self {
        WeightTable { rows: (0..=window).map(|d| sample_weights(d, kappa)).collect() }
    }

    pub fn window(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, d: usize) -> &[f64] {
        &self.rows[d]
    }
}

/// Weighted share of samples later than `threshold`; samples are oldest first.
pub fn p_delay(samples: &VecDeque<Time>, threshold: f64, weights: &WeightTable) -> f64 {
    let w = weights.get(samples.len());
    samples.iter().zip(w).filter(|(&s, _)| s as f64 > threshold).map(|(_, &w)| w).sum::<f64>().clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Learned {
    pub value: f64,
    pub count: u32,
}

/// What one passenger has learned about the network.
#[derive(Clone, Debug, Default)]
pub struct ExperienceStore {
    /// Driving arcs keyed by departure.
    pub loads: FxHashMap<EventId, Learned>,
    pub p_denied: FxHashMap<EventId, Learned>,
    /// Blended event times as observed, before repair.
    pub times: FxHashMap<EventId, Learned>,
    /// Non-decreasing times for every event of trips with observations.
    pub repaired: FxHashMap<EventId, f64>,
    pub arrivals: FxHashMap<EventId, VecDeque<Time>>,
}

/// Network state observed on one day.
#[derive(Clone, Debug, PartialEq)]
pub struct DayRecord {
    /// Per event: load of the driving arc leaving a departure (0 for arrivals).
    pub loads: Vec<f64>,
    /// Per event: share of boarding attempts denied at a departure.
    pub p_denied: Vec<f64>,
    /// Per event: realised time.
    pub times: Vec<Time>,
}

/// The parts of a day's journey that feed learning.
#[derive(Clone, Copy, Debug)]
pub struct Experience<'a> {
    /// Ridden segments as (boarding departure, alighting arrival).
    pub segments: &'a [(EventId, EventId)],
    pub denied: &'a [EventId],
}

#[derive(Clone, Copy, Debug)]
pub struct LearningParams {
    pub kappa: f64,
    pub sample_window: usize,
}

impl ExperienceStore {
    pub fn time(&self, net: &Network, e: EventId) -> f64 {
        self.repaired.get(&e).copied().unwrap_or(net.tau_reg(e) as f64)
    }

    /// Integrates one day and reports which keys of the expected view changed.
    pub fn end_of_day(
        &mut self,
        net: &Network,
        exp: Experience<'_>,
        day: &DayRecord,
        params: &LearningParams,
    ) -> ChangedKeys {
        let mut changed = ChangedKeys::default();
        if exp.segments.is_empty() && exp.denied.is_empty() {
            return changed;
        }
        let kappa = params.kappa;

        let mut journey_events: Vec<EventId> = Vec::new();
        for &(b, x) in exp.segments {
            journey_events.extend((b.0..=x.0).map(EventId));
        }
        journey_events.sort_unstable();
        journey_events.dedup();

        for &e in &journey_events {
            if net.event(e).kind == EventKind::Departure {
                let obs = day.loads[e.idx()];
                let l = self.loads.entry(e).or_insert(Learned { value: 0.0, count: 0 });
                l.count += 1;
                let v = blend(l.value, obs, l.count, kappa);
                if v.to_bits() != l.value.to_bits() || l.count == 1 {
                    changed.loads.push(e);
                }
                l.value = v;
            }
        }

        let mut deps: Vec<EventId> =
            journey_events.iter().copied().filter(|&e| net.event(e).kind == EventKind::Departure).collect();
        deps.extend_from_slice(exp.denied);
        deps.sort_unstable();
        deps.dedup();
        for &d in &deps {
            let obs = day.p_denied[d.idx()];
            let p = self.p_denied.entry(d).or_insert(Learned { value: 0.0, count: 0 });
            p.count += 1;
            let v = blend(p.value, obs, p.count, kappa).clamp(0.0, 1.0);
            if v.to_bits() != p.value.to_bits() {
                changed.p_denied.push(d);
            }
            p.value = v;
        }

        let mut trips: FxHashSet<TripId> = FxHashSet::default();
        for &e in &journey_events {
            let obs = day.times[e.idx()] as f64;
            let t = self.times.entry(e).or_insert(Learned { value: 0.0, count: 0 });
            t.count += 1;
            t.value = blend(t.value, obs, t.count, kappa);
            trips.insert(net.event(e).trip);
            if net.event(e).kind == EventKind::Arrival {
                let s = self.arrivals.entry(e).or_default();
                s.push_back(day.times[e.idx()]);
                while s.len() > params.sample_window {
                    s.pop_front();
                }
                changed.arrivals.push(e);
            }
        }

        let mut trips: Vec<TripId> = trips.into_iter().collect();
        trips.sort_unstable();
        for t in trips {
            for (e, v) in repair_trip(net, t, &self.times) {
                let old = self.time(net, e);
                if old.to_bits() != v.to_bits() {
                    changed.times.push(e);
                }
                self.repaired.insert(e, v);
            }
        }
        changed
    }
}

/// Non-decreasing learned times for every event of trip `t`. Events before the
/// first observation take its delay, later unobserved events carry the last
/// observed delay forward, then a running maximum removes inversions.
pub fn repair_trip(net: &Network, t: TripId, times: &FxHashMap<EventId, Learned>) -> Vec<(EventId, f64)> {
    let trip = net.trip(t);
    let events: Vec<EventId> = trip.events().collect();
    let first_delay = events.iter().find_map(|e| times.get(e).map(|l| l.value - net.tau_reg(*e) as f64));
    let Some(mut delay) = first_delay else { return Vec::new() };
    let mut out = Vec::with_capacity(events.len());
    let mut run = f64::NEG_INFINITY;
    for e in events {
        let reg = net.tau_reg(e) as f64;
        if let Some(l) = times.get(&e) {
            delay = l.value - reg;
        }
        run = run.max(reg + delay).max(reg);
        out.push((e, run));
    }
    out
}

/// The passenger's expectations: learned values where present, defaults otherwise.
#[derive(Clone, Copy)]
pub struct ExpectedView<'a> {
    pub net: &'a Network,
    pub store: &'a ExperienceStore,
    pub lambda_std: f64,
    pub weights: &'a WeightTable,
}

impl CostView for ExpectedView<'_> {
    #[inline]
    fn time(&self, e: EventId) -> f64 {
        self.store.time(self.net, e)
    }
    #[inline]
    fn load(&self, dep: EventId) -> f64 {
        self.store.loads.get(&dep).map(|l| l.value).unwrap_or(self.lambda_std)
    }
    #[inline]
    fn p_denied(&self, dep: EventId) -> f64 {
        self.store.p_denied.get(&dep).map(|l| l.value).unwrap_or(0.0)
    }
    #[inline]
    fn p_delay(&self, arr: EventId, threshold: f64) -> f64 {
        match self.store.arrivals.get(&arr) {
            Some(s) => p_delay(s, threshold, self.weights),
            None => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::two_stop_input;
    use crate::network::{BuildOptions, Network};

    #[test]
    fn blend_examples() {
        assert_eq!(blend(7.0, 3.0, 1, 0.5), 3.0);
        let m = blend(2.0, 4.0, 2, 1.0);
        assert_eq!(m, 3.0);
        assert_eq!(blend(10.0, 0.0, 4, 0.5), 5.0);
    }

    #[test]
    fn weights_examples() {
        assert_eq!(sample_weights(2, 1.0), vec![0.5, 0.5]);
        let s: f64 = sample_weights(50, 0.5).iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        let table = WeightTable::new(8, 1.0);
        let samples: VecDeque<Time> = [100, 200].into_iter().collect();
        assert_eq!(p_delay(&samples, 150.0, &table), 0.5);
        assert_eq!(p_delay(&samples, 250.0, &table), 0.0);
        assert_eq!(p_delay(&VecDeque::new(), 0.0, &table), 0.0);
    }

    fn net() -> Network {
        Network::build(&two_stop_input(), &BuildOptions::default()).unwrap()
    }

    fn record(net: &Network) -> DayRecord {
        DayRecord {
            loads: vec![0.0; net.events.len()],
            p_denied: vec![0.0; net.events.len()],
            times: net.scheduled_times(),
        }
    }

    #[test]
    fn stay_home_changes_nothing() {
        let net = net();
        let mut store = ExperienceStore::default();
        let params = LearningParams { kappa: 0.5, sample_window: 64 };
        let c = store.end_of_day(&net, Experience { segments: &[], denied: &[] }, &record(&net), &params);
        assert!(c.is_empty());
        assert!(store.loads.is_empty() && store.times.is_empty());
    }

    #[test]
    fn denial_first_update_is_identity() {
        let net = net();
        let mut store = ExperienceStore::default();
        let params = LearningParams { kappa: 0.5, sample_window: 64 };
        let d = net.trip(TripId(0)).dep(0);
        let mut day = record(&net);
        day.p_denied[d.idx()] = 1.0;
        let c = store.end_of_day(&net, Experience { segments: &[], denied: &[d] }, &day, &params);
        assert_eq!(store.p_denied[&d].value, 1.0);
        assert_eq!(c.p_denied, vec![d]);
    }

    #[test]
    fn repair_restores_monotone_times() {
        let net = net();
        let trip = net.trip(TripId(0));
        // Observed only the final arrival, late by 200 s, and the middle
        // departure early relative to a late arrival before it.
        let mut times = FxHashMap::default();
        times.insert(trip.arr(1), Learned { value: 1500.0, count: 1 });
        times.insert(trip.dep(1), Learned { value: 1400.0, count: 1 });
        let rep = repair_trip(&net, TripId(0), &times);
        let vals: Vec<f64> = rep.iter().map(|x| x.1).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{vals:?}");
        // Prefix inherits the first observed delay (+200).
        assert_eq!(vals[0], 1200.0);
        assert!(rep.iter().all(|&(e, v)| v >= net.tau_reg(e) as f64));
    }

    #[test]
    fn sample_window_caps_memory() {
        let net = net();
        let mut store = ExperienceStore::default();
        let params = LearningParams { kappa: 0.5, sample_window: 3 };
        let trip = net.trip(TripId(0));
        let seg = [(trip.dep(0), trip.arr(1))];
        for _ in 0..5 {
            store.end_of_day(&net, Experience { segments: &seg, denied: &[] }, &record(&net), &params);
        }
        assert_eq!(store.arrivals[&trip.arr(1)].len(), 3);
        assert_eq!(store.loads[&trip.dep(0)].count, 5);
    }
}
