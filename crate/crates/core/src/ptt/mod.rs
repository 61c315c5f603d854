//! Perceived travel time: component formulas, the initial profile scan and the
//! incrementally maintained per-passenger profile.

mod initial;
mod profile;

pub(crate) use initial::forward_sweep;
pub use initial::{compute_initial_profile, earliest_arrival, InitialProfile, ProfileQuery};
pub use profile::{ChangedKeys, Profile, Universe};

use crate::demand::PreferenceSet;
use crate::network::{EventId, EventKind, Network, StopId};

pub const INF: f64 = f64::INFINITY;

/// Source of expected event times, loads and failure probabilities.
pub trait CostView {
    fn time(&self, e: EventId) -> f64;
    /// Expected load of the driving arc leaving departure `dep`.
    fn load(&self, dep: EventId) -> f64;
    fn p_denied(&self, dep: EventId) -> f64;
    /// Probability that arrival `arr` happens later than `threshold`.
    fn p_delay(&self, arr: EventId, threshold: f64) -> f64;
}

/// Scheduled times, a standard load everywhere and no failures.
#[derive(Clone, Copy)]
pub struct DefaultView<'a> {
    pub net: &'a Network,
    pub lambda_std: f64,
}

impl CostView for DefaultView<'_> {
    fn time(&self, e: EventId) -> f64 {
        self.net.tau_reg(e) as f64
    }
    fn load(&self, _dep: EventId) -> f64 {
        self.lambda_std
    }
    fn p_denied(&self, _dep: EventId) -> f64 {
        0.0
    }
    fn p_delay(&self, _arr: EventId, _threshold: f64) -> f64 {
        0.0
    }
}

/// Everything that stays fixed for one passenger while costs are evaluated.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub net: &'a Network,
    pub prefs: &'a PreferenceSet,
    pub dest: StopId,
}

impl Ctx<'_> {
    /// Weighted walk from `s` to the destination; 0 at the destination, ∞ without a footpath.
    #[inline]
    pub fn walk_dest(&self, s: StopId) -> f64 {
        if s == self.dest {
            0.0
        } else {
            match self.net.footpath(s, self.dest) {
                Some(l) => self.prefs.beta_walk * l as f64,
                None => INF,
            }
        }
    }
}

#[inline]
pub fn ptt_activity(prefs: &PreferenceSet, load: f64, seated: bool, ivt: f64) -> f64 {
    prefs.crowding.factor(load, seated) * ivt
}

#[inline]
pub fn p_fail(p_denied: f64, p_delay: f64) -> f64 {
    p_denied + p_delay - p_denied * p_delay
}

/// Cost of a transfer; `penalty` is false for the boarding at the origin.
#[inline]
pub fn ptt_transfer(prefs: &PreferenceSet, headway: f64, p_fail: f64, wait: f64, walk: f64, penalty: bool) -> f64 {
    let fail = headway * prefs.beta_fail * p_fail;
    let base = prefs.beta_wait * wait + prefs.beta_walk * walk;
    if penalty {
        fail + base + prefs.beta_transfer
    } else {
        fail + base
    }
}

/// Riding cost from `start` (any event of a trip) to each later arrival of the
/// same trip, as a list of `(arrival, cost)`. `seated` is the seat state at
/// `start`; otherwise a seat is assumed from the first activity with load < 1.
/// When `start` is an arrival it is reported first with cost 0.
pub fn ride_costs<V: CostView>(
    ctx: &Ctx<'_>,
    view: &V,
    start: EventId,
    seated: bool,
    upto: Option<EventId>,
) -> Vec<(EventId, f64)> {
    let net = ctx.net;
    let trip = net.trip_of(start);
    let last = upto.unwrap_or_else(|| trip.last_event());
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut seated = seated;
    if net.event(start).kind == EventKind::Arrival {
        out.push((start, 0.0));
    }
    let mut e = start;
    while e < last {
        let next = EventId(e.0 + 1);
        let load = match net.event(e).kind {
            EventKind::Departure => view.load(e),
            EventKind::Arrival => view.load(next),
        };
        if load < 1.0 {
            seated = true;
        }
        acc += ptt_activity(ctx.prefs, load, seated, view.time(next) - view.time(e));
        if net.event(next).kind == EventKind::Arrival {
            out.push((next, acc));
        }
        e = next;
    }
    out
}

/// Cost of riding from departure `board` to arrival `exit` of the same trip.
pub fn ptt_trip_segment<V: CostView>(ctx: &Ctx<'_>, view: &V, board: EventId, exit: EventId) -> f64 {
    let net = ctx.net;
    assert!(
        net.event(board).trip == net.event(exit).trip && exit > board && net.event(exit).kind == EventKind::Arrival,
        "segment must run from a departure to a later arrival of the same trip"
    );
    ride_costs(ctx, view, board, false, Some(exit)).last().map(|&(_, c)| c).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::{stop, trip_rows};
    use crate::network::{BuildOptions, NetworkInput};
    use rustc_hash::FxHashMap;

    pub(crate) struct MapView<'a> {
        pub net: &'a Network,
        pub loads: FxHashMap<EventId, f64>,
    }

    impl CostView for MapView<'_> {
        fn time(&self, e: EventId) -> f64 {
            self.net.tau_reg(e) as f64
        }
        fn load(&self, dep: EventId) -> f64 {
            *self.loads.get(&dep).unwrap_or(&0.5)
        }
        fn p_denied(&self, _: EventId) -> f64 {
            0.0
        }
        fn p_delay(&self, _: EventId, _: f64) -> f64 {
            0.0
        }
    }

    fn line_net() -> Network {
        let mut input = NetworkInput::default();
        input.stops = (0..4).map(|i| stop(&format!("S{i}"), 0.0, 0.0, 0)).collect();
        let (t, rows) =
            trip_rows("t", "L", 10, 20, &[("S0", 0, 0), ("S1", 120, 130), ("S2", 250, 260), ("S3", 360, 360)]);
        input.trips.push(t);
        input.stop_times.extend(rows);
        Network::build(&input, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn component_formulas() {
        let p = PreferenceSet::default();
        assert_eq!(ptt_activity(&p, 0.5, true, 120.0), 120.0);
        assert!((ptt_activity(&p, 1.5, false, 100.0) - 220.0).abs() < 1e-9);
        assert!(ptt_activity(&p, 1.5, false, 100.0) > ptt_activity(&p, 1.5, true, 100.0));
        assert_eq!(p_fail(0.0, 0.0), 0.0);
        assert_eq!(p_fail(1.0, 0.3), 1.0);
        assert_eq!(p_fail(0.5, 0.5), 0.75);
        assert_eq!(ptt_transfer(&p, 600.0, 0.0, 60.0, 0.0, true), 360.0);
        assert_eq!(ptt_transfer(&p, 600.0, 0.0, 0.0, 100.0, true), 450.0);
        assert_eq!(ptt_transfer(&p, 600.0, 0.5, 60.0, 0.0, true), 960.0);
        assert_eq!(ptt_transfer(&p, 600.0, 0.0, 60.0, 0.0, false), 60.0);
    }

    #[test]
    fn segments_follow_seat_rule() {
        let net = line_net();
        let prefs = PreferenceSet::default();
        let ctx = Ctx { net: &net, prefs: &prefs, dest: StopId(3) };
        let t = net.trip(crate::network::TripId(0));
        let default = DefaultView { net: &net, lambda_std: 0.5 };
        assert_eq!(ptt_trip_segment(&ctx, &default, t.dep(0), t.arr(1)), 120.0);
        assert_eq!(ptt_trip_segment(&ctx, &default, t.dep(0), t.arr(2)), 250.0);

        // Standing on the first arc, a seat from the second arc onward.
        let mut loads = FxHashMap::default();
        loads.insert(t.dep(0), 1.5);
        loads.insert(t.dep(1), 0.9);
        loads.insert(t.dep(2), 1.5);
        let view = MapView { net: &net, loads };
        let manual = 2.2 * 120.0 + 1.2 * 10.0 + 1.2 * 120.0 + 1.4 * 10.0 + 1.4 * 100.0;
        assert!((ptt_trip_segment(&ctx, &view, t.dep(0), t.arr(3)) - manual).abs() < 1e-9);
        let rc = ride_costs(&ctx, &view, t.arr(1), false, None);
        assert_eq!(rc[0], (t.arr(1), 0.0));
        assert!((rc[1].1 - (1.2 * 10.0 + 1.2 * 120.0)).abs() < 1e-9);
    }
}
