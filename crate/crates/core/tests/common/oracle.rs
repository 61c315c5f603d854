//! Reference perceived travel times by exhaustive recursion over journeys,
//! written directly from the cost definitions under scheduled times and a
//! uniform standard load.

use rustc_hash::{FxHashMap, FxHashSet};

use ptassign::demand::PreferenceSet;
use ptassign::network::{EventId, EventKind, Network, StopId, Time};
use ptassign::ptt::Universe;

/// Departures of driving arcs that can be reached from `(origin, start)` and
/// arrive no later than `horizon`, found by iterating to a fixpoint.
pub fn reachable(net: &Network, origin: StopId, start: Time, horizon: Time) -> FxHashSet<EventId> {
    let mut ready = vec![Time::MAX; net.stops.len()];
    ready[origin.idx()] = start;
    for &(s, l) in net.footpaths_from(origin) {
        ready[s.idx()] = ready[s.idx()].min(start + l);
    }
    let mut set = FxHashSet::default();
    loop {
        let mut grew = false;
        for trip in &net.trips {
            let events: Vec<EventId> = trip.events().collect();
            let mut boarded = false;
            for &e in &events {
                if net.event(e).kind != EventKind::Departure {
                    continue;
                }
                boarded |= ready[net.stop_of(e).idx()] <= net.tau_reg(e);
                let a = EventId(e.0 + 1);
                if !boarded || net.tau_reg(a) > horizon {
                    continue;
                }
                if set.insert(e) {
                    grew = true;
                }
                let s = net.stop_of(a);
                let ta = net.tau_reg(a);
                ready[s.idx()] = ready[s.idx()].min(ta + net.stops[s.idx()].mct);
                for &(s2, l) in net.footpaths_from(s) {
                    ready[s2.idx()] = ready[s2.idx()].min(ta + l);
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

/// Earliest arrival at `dest` over every reachable arc and final walk.
pub fn earliest_arrival(net: &Network, origin: StopId, dest: StopId, start: Time) -> Option<Time> {
    if origin == dest {
        return Some(start);
    }
    let mut best = net.footpath(origin, dest).map(|l| start + l);
    for d in reachable(net, origin, start, Time::MAX) {
        let a = EventId(d.0 + 1);
        let s = net.stop_of(a);
        let at = if s == dest { Some(net.tau_reg(a)) } else { net.footpath(s, dest).map(|l| net.tau_reg(a) + l) };
        if let Some(t) = at {
            best = Some(best.map_or(t, |b: Time| b.min(t)));
        }
    }
    best
}

pub struct Oracle<'a> {
    pub net: &'a Network,
    pub prefs: &'a PreferenceSet,
    pub dest: StopId,
    pub factor: f64,
    arcs: FxHashSet<EventId>,
    boardable: Box<dyn Fn(EventId) -> bool + 'a>,
    exit_ok: Box<dyn Fn(EventId) -> bool + 'a>,
    blocked: Box<dyn Fn(EventId, StopId) -> bool + 'a>,
    memo_dep: FxHashMap<EventId, f64>,
    memo_arr: FxHashMap<EventId, f64>,
    /// Alighting values whose optimum continues on another trip.
    pub transfers: usize,
}

impl<'a> Oracle<'a> {
    /// Every arc of `arcs` may be boarded and left, every footpath walked.
    pub fn open(
        net: &'a Network,
        prefs: &'a PreferenceSet,
        dest: StopId,
        lambda: f64,
        arcs: FxHashSet<EventId>,
    ) -> Self {
        let factor = prefs.crowding.factor(lambda, lambda < 1.0);
        Oracle {
            net,
            prefs,
            dest,
            factor,
            arcs,
            boardable: Box::new(|_| true),
            exit_ok: Box::new(|_| true),
            blocked: Box::new(|_, _| false),
            memo_dep: FxHashMap::default(),
            memo_arr: FxHashMap::default(),
            transfers: 0,
        }
    }

    /// Restricted to what `u` permits.
    pub fn within(net: &'a Network, prefs: &'a PreferenceSet, dest: StopId, lambda: f64, u: &'a Universe) -> Self {
        let mut o = Oracle::open(net, prefs, dest, lambda, u.arcs().iter().copied().collect());
        o.boardable = Box::new(move |d| u.is_boardable(d));
        o.exit_ok = Box::new(move |a| u.is_exit(a));
        o.blocked = Box::new(move |a, s| u.is_blocked(a, s));
        o
    }

    fn walk_dest(&self, s: StopId) -> f64 {
        if s == self.dest {
            0.0
        } else {
            self.net.footpath(s, self.dest).map_or(f64::INFINITY, |l| self.prefs.beta_walk * l as f64)
        }
    }

    /// Cheapest continuation after getting off at `a`.
    pub fn f_arr(&mut self, a: EventId) -> f64 {
        if let Some(&v) = self.memo_arr.get(&a) {
            return v;
        }
        let net = self.net;
        let p = self.prefs;
        let s = net.stop_of(a);
        let ta = net.tau_reg(a);
        let trip = net.event(a).trip;
        let mut best = self.walk_dest(s);
        let mut moves = vec![(s, net.stops[s.idx()].mct, 0)];
        for &(s2, l) in net.footpaths_from(s) {
            if !(self.blocked)(a, s2) {
                moves.push((s2, l, l));
            }
        }
        let mut targets = Vec::new();
        for &d in &self.arcs {
            if net.event(d).trip == trip || !(self.boardable)(d) {
                continue;
            }
            for &(s2, min, walk) in &moves {
                if net.stop_of(d) == s2 && net.tau_reg(d) >= ta + min {
                    let wait = (net.tau_reg(d) - ta - walk) as f64;
                    targets.push((d, p.beta_transfer + p.beta_wait * wait + p.beta_walk * walk as f64));
                }
            }
        }
        let walk = best;
        for (d, c) in targets {
            best = best.min(c + self.f_dep(d));
        }
        self.transfers += (best < walk) as usize;
        self.memo_arr.insert(a, best);
        best
    }

    /// Cheapest journey from boarding `d`, riding to any later exit.
    pub fn f_dep(&mut self, d: EventId) -> f64 {
        if let Some(&v) = self.memo_dep.get(&d) {
            return v;
        }
        let net = self.net;
        let last = net.trip_of(d).last_event();
        let mut best = f64::INFINITY;
        let mut dep = d;
        while dep < last && self.arcs.contains(&dep) {
            let a = EventId(dep.0 + 1);
            if (self.exit_ok)(a) {
                let ride = self.factor * (net.tau_reg(a) - net.tau_reg(d)) as f64;
                best = best.min(ride + self.f_arr(a));
            }
            dep = EventId(dep.0 + 2);
        }
        self.memo_dep.insert(d, best);
        best
    }
}
