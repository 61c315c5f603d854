//! Per-passenger profile over the reduced event universe, recomputed in full or
//! updated from a set of changed arcs with a priority queue.

use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{p_fail, ptt_activity, ptt_transfer, CostView, Ctx, INF};
use crate::network::{EventId, Network, StopId, Time};

/// The events a passenger may use after choice-set reduction.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    /// Driving arcs (keyed by departure) in processing order: descending by
    /// scheduled departure, then arrival, then id.
    arcs: Vec<EventId>,
    slot: FxHashMap<EventId, u32>,
    boardable: Vec<bool>,
    exit_ok: Vec<bool>,
    deps_at: FxHashMap<StopId, Vec<EventId>>,
    exits_at: FxHashMap<StopId, Vec<EventId>>,
    blocked: FxHashSet<(EventId, StopId)>,
    pub horizon: Time,
}

impl Universe {
    pub fn new(
        net: &Network,
        mut arcs: Vec<EventId>,
        boardable: impl Fn(EventId) -> bool,
        exit_ok: impl Fn(EventId) -> bool,
        blocked: FxHashSet<(EventId, StopId)>,
        horizon: Time,
    ) -> Universe {
        let key = |d: EventId| (net.tau_reg(d), net.tau_reg(EventId(d.0 + 1)), d);
        arcs.sort_by_key(|&d| std::cmp::Reverse(key(d)));
        arcs.dedup();
        let mut u = Universe { horizon, blocked, ..Default::default() };
        for (i, &d) in arcs.iter().enumerate() {
            u.slot.insert(d, i as u32);
            let a = EventId(d.0 + 1);
            let b = boardable(d);
            let x = exit_ok(a);
            u.boardable.push(b);
            u.exit_ok.push(x);
            if b {
                u.deps_at.entry(net.stop_of(d)).or_default().push(d);
            }
            if x {
                u.exits_at.entry(net.stop_of(a)).or_default().push(a);
            }
        }
        for v in u.deps_at.values_mut().chain(u.exits_at.values_mut()) {
            v.sort_by_key(|&e| (net.tau_reg(e), e));
        }
        u.arcs = arcs;
        u
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arcs(&self) -> &[EventId] {
        &self.arcs
    }

    #[inline]
    pub fn slot(&self, dep: EventId) -> Option<usize> {
        self.slot.get(&dep).map(|&s| s as usize)
    }

    pub fn contains_arc(&self, dep: EventId) -> bool {
        self.slot.contains_key(&dep)
    }

    pub fn is_boardable(&self, dep: EventId) -> bool {
        self.slot(dep).is_some_and(|s| self.boardable[s])
    }

    pub fn is_exit(&self, arr: EventId) -> bool {
        arr.0 > 0 && self.slot(EventId(arr.0 - 1)).is_some_and(|s| self.exit_ok[s])
    }

    pub fn is_blocked(&self, arr: EventId, to: StopId) -> bool {
        !self.blocked.is_empty() && self.blocked.contains(&(arr, to))
    }

    /// Boardable departures at `s`, ascending by scheduled time.
    pub fn deps_at(&self, s: StopId) -> &[EventId] {
        self.deps_at.get(&s).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Usable exits at `s`, ascending by scheduled time.
    pub fn exits_at(&self, s: StopId) -> &[EventId] {
        self.exits_at.get(&s).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn num_boardable(&self) -> usize {
        self.boardable.iter().filter(|&&b| b).count()
    }

    pub fn num_exits(&self) -> usize {
        self.exit_ok.iter().filter(|&&b| b).count()
    }
}

/// Keys whose expected values changed since the profile was last brought up to date.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChangedKeys {
    /// Driving arcs (by departure) with a new expected load.
    pub loads: Vec<EventId>,
    pub times: Vec<EventId>,
    pub p_denied: Vec<EventId>,
    /// Arrivals with new arrival-time samples.
    pub arrivals: Vec<EventId>,
}

impl ChangedKeys {
    pub fn is_empty(&self) -> bool {
        self.loads.is_empty() && self.times.is_empty() && self.p_denied.is_empty() && self.arrivals.is_empty()
    }
}

/// Best transfer found by a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferChoice {
    pub cost: f64,
    pub dep: Option<EventId>,
}

#[derive(Clone, Debug, Default)]
pub struct Profile {
    universe: Universe,
    /// Per slot: cost from the arc's departure when seated from there on.
    sit: Vec<f64>,
    /// Per slot: cost from the arc's departure for a passenger boarding there.
    cur: Vec<f64>,
    /// Per slot: cost of alighting at the arc's arrival.
    alight: Vec<f64>,
    pub earliest_arrival: Option<Time>,
}

impl Profile {
    pub fn new(universe: Universe, earliest_arrival: Option<Time>) -> Profile {
        let n = universe.len();
        Profile { universe, sit: vec![INF; n], cur: vec![INF; n], alight: vec![INF; n], earliest_arrival }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// f of a boardable departure.
    pub fn f_dep(&self, dep: EventId) -> Option<f64> {
        let s = self.universe.slot(dep)?;
        (self.universe.boardable[s] && self.cur[s].is_finite()).then_some(self.cur[s])
    }

    /// f of a usable exit.
    pub fn f_arr(&self, arr: EventId) -> Option<f64> {
        if arr.0 == 0 {
            return None;
        }
        let s = self.universe.slot(EventId(arr.0 - 1))?;
        (self.universe.exit_ok[s] && self.alight[s].is_finite()).then_some(self.alight[s])
    }

    /// Every stored f value: boardable departures and usable exits.
    pub fn stored_values(&self) -> Vec<(EventId, f64)> {
        let mut out = Vec::new();
        for (s, &d) in self.universe.arcs.iter().enumerate() {
            if self.universe.boardable[s] && self.cur[s].is_finite() {
                out.push((d, self.cur[s]));
            }
            if self.universe.exit_ok[s] && self.alight[s].is_finite() {
                out.push((EventId(d.0 + 1), self.alight[s]));
            }
        }
        out.sort_by_key(|&(e, _)| e);
        out
    }

    /// Internal registers per arc, for exact comparisons.
    pub fn registers(&self) -> Vec<(EventId, u64, u64, u64)> {
        let mut out: Vec<_> = self
            .universe
            .arcs
            .iter()
            .enumerate()
            .map(|(s, &d)| (d, self.sit[s].to_bits(), self.cur[s].to_bits(), self.alight[s].to_bits()))
            .collect();
        out.sort_by_key(|x| x.0);
        out
    }

    /// Best transfer out of `arr` under `view`, validity checked against the
    /// scheduled departure time.
    pub fn best_transfer<V: CostView>(&self, ctx: &Ctx<'_>, view: &V, arr: EventId) -> TransferChoice {
        let net = ctx.net;
        let prefs = ctx.prefs;
        let u = &self.universe;
        let t = net.event(arr).trip;
        let s = net.stop_of(arr);
        let ta = view.time(arr);
        let mut best = TransferChoice { cost: INF, dep: None };
        let mut best_key = (Time::MAX, EventId(u32::MAX));
        let mct = net.stops[s.idx()].mct;
        let same = std::iter::once((s, mct, 0));
        let others = net.footpaths_from(s).iter().filter(|&&(s2, _)| !u.is_blocked(arr, s2)).map(|&(s2, l)| (s2, l, l));
        for (s2, min, walk) in same.chain(others) {
            let deps = u.deps_at(s2);
            let thr = ta + min as f64;
            let walk_f = walk as f64;
            let from = deps.partition_point(|&d| (net.tau_reg(d) as f64) < thr);
            let fixed = prefs.beta_walk * walk_f + prefs.beta_transfer;
            for &d in &deps[from..] {
                let reg = net.tau_reg(d) as f64;
                if prefs.beta_wait * (reg - ta - walk_f) + fixed > best.cost {
                    break;
                }
                if net.event(d).trip == t {
                    continue;
                }
                let fd = self.cur[self.universe.slot[&d] as usize];
                if fd == INF {
                    continue;
                }
                let wait = view.time(d) - ta - walk_f;
                let pf = p_fail(view.p_denied(d), view.p_delay(arr, reg - min as f64));
                let c = fd + ptt_transfer(prefs, net.headway(d), pf, wait, walk_f, true);
                let key = (net.tau_reg(d), d);
                if c < best.cost || (c == best.cost && key < best_key) {
                    best = TransferChoice { cost: c, dep: Some(d) };
                    best_key = key;
                }
            }
        }
        best
    }

    fn relax<V: CostView>(&mut self, ctx: &Ctx<'_>, view: &V, s: usize) {
        let net = ctx.net;
        let prefs = ctx.prefs;
        let d = self.universe.arcs[s];
        let a = EventId(d.0 + 1);
        let alight = if self.universe.exit_ok[s] {
            self.best_transfer(ctx, view, a).cost.min(ctx.walk_dest(net.stop_of(a)))
        } else {
            INF
        };
        let (rem_sit, rem_cur) = match self.universe.slot(EventId(a.0 + 1)) {
            Some(ns) if net.event(a).trip == net.event(EventId(a.0 + 1)).trip => {
                let dn = EventId(a.0 + 1);
                let ln = view.load(dn);
                let dwell = view.time(dn) - view.time(a);
                let rem_sit = ptt_activity(prefs, ln, true, dwell) + self.sit[ns];
                let rem_cur = if ln < 1.0 { rem_sit } else { ptt_activity(prefs, ln, false, dwell) + self.cur[ns] };
                (rem_sit, rem_cur)
            }
            _ => (INF, INF),
        };
        let load = view.load(d);
        let ivt = view.time(a) - view.time(d);
        let sit = ptt_activity(prefs, load, true, ivt) + alight.min(rem_sit);
        let cur = if load < 1.0 { sit } else { ptt_activity(prefs, load, false, ivt) + alight.min(rem_cur) };
        self.sit[s] = sit;
        self.cur[s] = cur;
        self.alight[s] = alight;
    }

    /// Recomputes every arc from scratch under `view`.
    pub fn full_recompute<V: CostView>(&mut self, ctx: &Ctx<'_>, view: &V) {
        self.sit.iter_mut().for_each(|v| *v = INF);
        self.cur.iter_mut().for_each(|v| *v = INF);
        self.alight.iter_mut().for_each(|v| *v = INF);
        for s in 0..self.universe.len() {
            self.relax(ctx, view, s);
        }
    }

    fn push_transfer_preds(&self, net: &Network, d: EventId, heap: &mut BinaryHeap<Key>, queued: &mut [bool]) {
        let sd = net.stop_of(d);
        let td = net.tau_reg(d);
        let mut push_from = |s: StopId| {
            for &a in self.universe.exits_at(s) {
                if net.tau_reg(a) > td {
                    break;
                }
                if s != sd && self.universe.is_blocked(a, sd) {
                    continue;
                }
                if let Some(p) = self.universe.slot(EventId(a.0 - 1)) {
                    push(&self.universe, net, p, heap, queued);
                }
            }
        };
        push_from(sd);
        for &(s2, _) in net.footpaths_to(sd) {
            push_from(s2);
        }
    }

    /// Arcs whose values may depend on the changed keys.
    pub fn dirty_arcs(&self, net: &Network, changed: &ChangedKeys) -> Vec<EventId> {
        let u = &self.universe;
        let mut heap = BinaryHeap::new();
        let mut queued = vec![false; u.len()];
        let add = |d: EventId, heap: &mut BinaryHeap<Key>, queued: &mut Vec<bool>| {
            if let Some(s) = u.slot(d) {
                push(u, net, s, heap, queued);
            }
        };
        let prev_dep = |d: EventId| -> Option<EventId> { (net.event(d).seq > 0).then(|| EventId(d.0 - 2)) };
        for &d in &changed.loads {
            add(d, &mut heap, &mut queued);
            if let Some(p) = prev_dep(d) {
                add(p, &mut heap, &mut queued);
            }
        }
        for &e in &changed.times {
            match net.event(e).kind {
                crate::network::EventKind::Departure => {
                    add(e, &mut heap, &mut queued);
                    if let Some(p) = prev_dep(e) {
                        add(p, &mut heap, &mut queued);
                    }
                    self.push_transfer_preds(net, e, &mut heap, &mut queued);
                }
                crate::network::EventKind::Arrival => add(EventId(e.0 - 1), &mut heap, &mut queued),
            }
        }
        for &d in &changed.p_denied {
            self.push_transfer_preds(net, d, &mut heap, &mut queued);
        }
        for &a in &changed.arrivals {
            add(EventId(a.0 - 1), &mut heap, &mut queued);
        }
        heap.into_sorted_vec().into_iter().rev().map(|k| k.2).collect()
    }

    /// Brings the profile up to date after the values behind `changed` moved.
    /// The result is bit-identical to `full_recompute` under the same view.
    pub fn update<V: CostView>(&mut self, ctx: &Ctx<'_>, view: &V, changed: &ChangedKeys) -> usize {
        let dirty = self.dirty_arcs(ctx.net, changed);
        self.update_arcs(ctx, view, &dirty)
    }

    /// Priority-queue update seeded with `dirty` arcs; returns the number of arcs relaxed.
    pub fn update_arcs<V: CostView>(&mut self, ctx: &Ctx<'_>, view: &V, dirty: &[EventId]) -> usize {
        let net = ctx.net;
        let mut heap = BinaryHeap::new();
        let mut queued = vec![false; self.universe.len()];
        for &d in dirty {
            if let Some(s) = self.universe.slot(d) {
                push(&self.universe, net, s, &mut heap, &mut queued);
            }
        }
        let mut relaxed = 0;
        while let Some(Key(_, _, d)) = heap.pop() {
            let s = self.universe.slot[&d] as usize;
            queued[s] = false;
            let before = (self.sit[s].to_bits(), self.cur[s].to_bits());
            self.relax(ctx, view, s);
            relaxed += 1;
            let changed_sit = self.sit[s].to_bits() != before.0;
            let changed_cur = self.cur[s].to_bits() != before.1;
            if (changed_sit || changed_cur) && net.event(d).seq > 0 {
                if let Some(p) = self.universe.slot(EventId(d.0 - 2)) {
                    push(&self.universe, net, p, &mut heap, &mut queued);
                }
            }
            if changed_cur && self.universe.boardable[s] {
                self.push_transfer_preds(net, d, &mut heap, &mut queued);
            }
        }
        relaxed
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key(Time, Time, EventId);

fn push(u: &Universe, net: &Network, s: usize, heap: &mut BinaryHeap<Key>, queued: &mut [bool]) {
    if !queued[s] {
        queued[s] = true;
        let d = u.arcs[s];
        heap.push(Key(net.tau_reg(d), net.tau_reg(EventId(d.0 + 1)), d));
    }
}
