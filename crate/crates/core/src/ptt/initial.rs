//! Initial perceived travel times by a profile connection scan with Pareto
//! labels per stop, over the driving arcs reachable within the horizon.

use rustc_hash::FxHashMap;

use super::{ptt_activity, Ctx, INF};
use crate::network::{EventId, Network, StopId, Time, TripId};

#[derive(Clone, Copy, Debug)]
pub struct ProfileQuery {
    pub origin: StopId,
    pub tau_start: Time,
    pub lambda_std: f64,
    /// Journeys arriving more than this after the earliest arrival are discarded.
    pub delta_tau: Time,
    pub frame_end: Time,
}

#[derive(Clone, Debug)]
pub struct InitialProfile {
    /// Perceived time to the destination per event; ∞ where undefined.
    pub f0: Vec<f64>,
    /// Relevant driving arcs (keyed by departure), descending by departure time.
    pub arcs: Vec<EventId>,
    pub earliest_arrival: Option<Time>,
    pub horizon: Time,
}

impl InitialProfile {
    pub fn value(&self, e: EventId) -> Option<f64> {
        let v = self.f0[e.idx()];
        v.is_finite().then_some(v)
    }
}

/// Forward scan from `(origin, tau_start)`. Boarding at the origin needs no
/// transfer time; later same-stop boardings need the stop's mct and footpath
/// boardings the footpath length. Returns reached arcs in ascending order.
pub(crate) fn forward_sweep(
    net: &Network,
    origin: StopId,
    tau_start: Time,
    horizon: Time,
    boardable: impl Fn(EventId) -> bool,
    exit_ok: impl Fn(EventId) -> bool,
    footpath_ok: impl Fn(EventId, StopId) -> bool,
) -> Vec<EventId> {
    let mut ready = vec![Time::MAX; net.stops.len()];
    ready[origin.idx()] = tau_start;
    for &(s, l) in net.footpaths_from(origin) {
        ready[s.idx()] = ready[s.idx()].min(tau_start + l);
    }
    let mut in_trip = vec![false; net.trips.len()];
    let arcs = net.arcs_by_time();
    let first = arcs.partition_point(|&d| net.tau_reg(d) < tau_start);
    let mut out = Vec::new();
    for &d in &arcs[first..] {
        let ev = net.event(d);
        if ev.tau_reg > horizon {
            break;
        }
        let t = ev.trip.idx();
        if !(in_trip[t] || (ready[ev.stop.idx()] <= ev.tau_reg && boardable(d))) {
            continue;
        }
        let a = EventId(d.0 + 1);
        let ta = net.tau_reg(a);
        if ta > horizon {
            continue;
        }
        in_trip[t] = true;
        out.push(d);
        if exit_ok(a) {
            let s = net.stop_of(a);
            ready[s.idx()] = ready[s.idx()].min(ta + net.stops[s.idx()].mct);
            for &(s2, l) in net.footpaths_from(s) {
                if footpath_ok(a, s2) {
                    ready[s2.idx()] = ready[s2.idx()].min(ta + l);
                }
            }
        }
    }
    out
}

/// Earliest scheduled arrival at `dest`, including a final or direct walk.
pub fn earliest_arrival(net: &Network, origin: StopId, dest: StopId, tau_start: Time) -> Option<Time> {
    let mut best = net.footpath(origin, dest).map(|l| tau_start + l).unwrap_or(Time::MAX);
    if origin == dest {
        return Some(tau_start);
    }
    let mut ready = vec![Time::MAX; net.stops.len()];
    ready[origin.idx()] = tau_start;
    for &(s, l) in net.footpaths_from(origin) {
        ready[s.idx()] = ready[s.idx()].min(tau_start + l);
    }
    let mut in_trip = vec![false; net.trips.len()];
    let arcs = net.arcs_by_time();
    let first = arcs.partition_point(|&d| net.tau_reg(d) < tau_start);
    for &d in &arcs[first..] {
        let ev = net.event(d);
        if ev.tau_reg >= best {
            break;
        }
        let t = ev.trip.idx();
        if !(in_trip[t] || ready[ev.stop.idx()] <= ev.tau_reg) {
            continue;
        }
        in_trip[t] = true;
        let a = EventId(d.0 + 1);
        let ta = net.tau_reg(a);
        let s = net.stop_of(a);
        if s == dest {
            best = best.min(ta);
        } else if let Some(l) = net.footpath(s, dest) {
            best = best.min(ta + l);
        }
        ready[s.idx()] = ready[s.idx()].min(ta + net.stops[s.idx()].mct);
        for &(s2, l) in net.footpaths_from(s) {
            ready[s2.idx()] = ready[s2.idx()].min(ta + l);
        }
    }
    (best != Time::MAX).then_some(best)
}

#[derive(Clone, Copy, Debug)]
struct Label {
    tau: f64,
    ptt: f64,
    trip: TripId,
}

/// Pareto label sets per stop, each kept in descending departure order.
struct LabelSets {
    sets: Vec<Vec<Label>>,
    per_trip: FxHashMap<(StopId, TripId), u32>,
    beta_wait: f64,
}

impl LabelSets {
    fn new(n_stops: usize, beta_wait: f64) -> Self {
        LabelSets { sets: vec![Vec::new(); n_stops], per_trip: FxHashMap::default(), beta_wait }
    }

    /// Inserts unless dominated; drops labels the new one dominates.
    fn insert(&mut self, s: StopId, l: Label) {
        let bw = self.beta_wait;
        let set = &mut self.sets[s.idx()];
        // Labels at index < pos depart strictly after l.tau.
        let pos = set.partition_point(|x| x.tau > l.tau);
        if pos > 0 {
            let later = set[pos - 1];
            if later.ptt + bw * (later.tau - l.tau) <= l.ptt {
                return;
            }
        }
        if pos < set.len() && set[pos].tau == l.tau && set[pos].ptt <= l.ptt {
            return;
        }
        let mut end = pos;
        while end < set.len() {
            let x = set[end];
            if l.ptt + bw * (l.tau - x.tau) <= x.ptt {
                end += 1;
            } else {
                break;
            }
        }
        for x in set.drain(pos..end) {
            let c = self.per_trip.get_mut(&(s, x.trip)).unwrap();
            *c -= 1;
        }
        set.insert(pos, l);
        *self.per_trip.entry((s, l.trip)).or_insert(0) += 1;
    }

    /// Earliest label departing at or after `tau` whose trip is not `t`.
    /// `None` means the label set cannot answer exactly and the caller must scan.
    fn lookup(&self, s: StopId, tau: f64, t: TripId) -> Option<Option<Label>> {
        let set = &self.sets[s.idx()];
        let end = set.partition_point(|x| x.tau >= tau);
        if end == 0 {
            return Some(None);
        }
        if self.per_trip.get(&(s, t)).copied().unwrap_or(0) > 0 && set[..end].iter().any(|x| x.trip == t) {
            return None;
        }
        Some(Some(set[end - 1]))
    }
}

/// Perceived travel times under scheduled times, the standard load and no
/// failures, over the arcs reachable from the passenger's start within
/// `earliest arrival + delta_tau` (capped at the frame end).
pub fn compute_initial_profile(ctx: &Ctx<'_>, q: &ProfileQuery) -> InitialProfile {
    let net = ctx.net;
    let mut f0 = vec![INF; net.events.len()];
    let Some(ea) = earliest_arrival(net, q.origin, ctx.dest, q.tau_start) else {
        return InitialProfile { f0, arcs: Vec::new(), earliest_arrival: None, horizon: q.tau_start };
    };
    let horizon = (ea.saturating_add(q.delta_tau)).min(q.frame_end.max(ea));
    let mut arcs = forward_sweep(net, q.origin, q.tau_start, horizon, |_| true, |_| true, |_, _| true);
    arcs.reverse();

    let prefs = ctx.prefs;
    let seated = q.lambda_std < 1.0;
    let factor = prefs.crowding.factor(q.lambda_std, seated);
    let mut labels = LabelSets::new(net.stops.len(), prefs.beta_wait);
    let mut curr: FxHashMap<TripId, f64> = FxHashMap::default();

    for &d in &arcs {
        let ev = net.event(d);
        let t = ev.trip;
        let a = EventId(d.0 + 1);
        let s = net.stop_of(a);
        let ta = net.tau_reg(a) as f64;

        let transfer = match labels.lookup(s, ta, t) {
            Some(Some(l)) => l.ptt + prefs.beta_transfer + prefs.beta_wait * (l.tau - ta),
            Some(None) => INF,
            None => explicit_transfer(ctx, &f0, a),
        };
        let alight = transfer.min(ctx.walk_dest(s));
        let remain = match curr.get(&t) {
            Some(&c) if a != net.trip(t).last_event() => {
                let dwell = (net.tau_reg(EventId(a.0 + 1)) - net.tau_reg(a)) as f64;
                c + ptt_activity(prefs, q.lambda_std, seated, dwell)
            }
            _ => INF,
        };
        let minptt = alight.min(remain);
        if minptt == INF {
            continue;
        }
        let ivt = (net.tau_reg(a) - ev.tau_reg) as f64;
        let c = minptt + factor * ivt;
        curr.insert(t, c);
        f0[a.idx()] = alight;
        f0[d.idx()] = c;

        let td = ev.tau_reg as f64;
        let mct = net.stops[ev.stop.idx()].mct as f64;
        labels.insert(ev.stop, Label { tau: td - mct, ptt: c + prefs.beta_wait * mct, trip: t });
        for &(s2, l) in net.footpaths_to(ev.stop) {
            let l = l as f64;
            labels.insert(s2, Label { tau: td - l, ptt: c + prefs.beta_walk * l, trip: t });
        }
    }

    InitialProfile { f0, arcs, earliest_arrival: Some(ea), horizon }
}

/// Best transfer out of `a` by direct enumeration of already scanned departures.
fn explicit_transfer(ctx: &Ctx<'_>, f0: &[f64], a: EventId) -> f64 {
    let net = ctx.net;
    let prefs = ctx.prefs;
    let t = net.event(a).trip;
    let s = net.stop_of(a);
    let ta = net.tau_reg(a);
    let mut best = INF;
    let same = std::iter::once((s, net.stops[s.idx()].mct, 0));
    for (s2, min, walk) in same.chain(net.footpaths_from(s).iter().map(|&(s2, l)| (s2, l, l))) {
        let deps = net.departures_at(s2);
        let from = deps.partition_point(|&d| net.tau_reg(d) < ta + min);
        for &d in &deps[from..] {
            let fd = f0[d.idx()];
            if fd == INF || net.event(d).trip == t {
                continue;
            }
            let wait = (net.tau_reg(d) - ta - walk) as f64;
            let c = fd + prefs.beta_transfer + prefs.beta_wait * wait + prefs.beta_walk * walk as f64;
            best = best.min(c);
        }
    }
    best
}
