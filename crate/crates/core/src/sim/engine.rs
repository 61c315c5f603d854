//! The event loop of one day.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand_chacha::ChaCha8Rng;

use super::accounting::{DayReport, Journey};
use super::{Agent, DayResult, SimConfig};
use crate::choice::{
    alighting_decision, boarding_decision, decide_boarding, plan_for_exit, relevant_departures, softmax_select,
    AlightingPlan, BoardingChoice, BoardingOption, BoardingPlan, ChoiceParams, StopContext,
};
use crate::congestion::{dwell_delay, process_stop, propagate_delay, PaxId, VehicleState};
use crate::learning::{DayRecord, ExpectedView, WeightTable};
use crate::network::{EventId, EventKind, Network, StopId, Time, TripId};
use crate::ptt::{ride_costs, Ctx, INF};
use crate::realtime::{
    boarding_redo_triggered, boarding_switch_reasons, decide_switch, onward_lost, rt_alight, rt_departure_value,
    rt_ride_options, AlightingSwitchReasons, RealtimeCounters, RtView, SwitchOutcome,
};
use crate::rng::{stream, Tag};

const ARRIVAL: u8 = 0;
const DEPARTURE: u8 = 1;

#[derive(Clone, Copy, Debug)]
struct Waiting {
    sc: StopContext,
    plan: BoardingPlan,
    ready_at: Time,
    after_denial: bool,
}

#[derive(Clone, Copy, Debug)]
struct Riding {
    board: EventId,
    plan: AlightingPlan,
}

#[derive(Clone, Copy, Debug)]
enum Phase {
    Pending,
    Waiting(Waiting),
    Riding(Riding),
    Done,
    Stranded,
}

struct Pax {
    phase: Phase,
    rng: ChaCha8Rng,
    journey: Journey,
}

struct Day<'a> {
    net: &'a Network,
    cfg: &'a SimConfig,
    agents: &'a [Agent],
    weights: &'a WeightTable,
    params: ChoiceParams,
    day: u32,
    times: Vec<Time>,
    processed: Vec<bool>,
    queue: BinaryHeap<Reverse<(Time, u8, u32)>>,
    vehicles: Vec<VehicleState>,
    /// Passengers who got off at the latest arrival of each trip.
    alighted: Vec<usize>,
    waiting: Vec<Vec<PaxId>>,
    pax: Vec<Pax>,
    next_start: usize,
    onboard: Vec<u32>,
    attempts: Vec<u32>,
    denied: Vec<u32>,
    counters: RealtimeCounters,
    violations: usize,
}

pub(super) fn run_day(net: &Network, cfg: &SimConfig, agents: &[Agent], weights: &WeightTable, day: u32) -> DayResult {
    let n = net.events.len();
    let times = net.scheduled_times();
    let mut queue = BinaryHeap::with_capacity(n);
    for (i, e) in net.events.iter().enumerate() {
        queue.push(Reverse((times[i], kind_key(e.kind), i as u32)));
    }
    let pax = agents
        .iter()
        .map(|a| Pax {
            phase: Phase::Pending,
            rng: stream(cfg.seed, Tag::Passenger, &[day as u64, a.pax.id as u64]),
            journey: Journey::new(a.pax.id, a.pax.origin, a.pax.tau_start < cfg.eval_end),
        })
        .collect();
    let mut d = Day {
        net,
        cfg,
        agents,
        weights,
        params: cfg.choice_params(day),
        day,
        times,
        processed: vec![false; n],
        queue,
        vehicles: net.trips.iter().enumerate().map(|(i, t)| VehicleState::new(TripId(i as u32), t)).collect(),
        alighted: vec![0; net.trips.len()],
        waiting: vec![Vec::new(); net.stops.len()],
        pax,
        next_start: 0,
        onboard: vec![0; n],
        attempts: vec![0; n],
        denied: vec![0; n],
        counters: RealtimeCounters::default(),
        violations: 0,
    };
    d.run();
    d.finish()
}

fn kind_key(k: EventKind) -> u8 {
    match k {
        EventKind::Arrival => ARRIVAL,
        EventKind::Departure => DEPARTURE,
    }
}

impl<'a> Day<'a> {
    fn run(&mut self) {
        let mut last = (Time::MIN, 0, 0);
        while let Some(Reverse(key)) = self.queue.pop() {
            let (t, _, id) = key;
            let e = EventId(id);
            if self.processed[e.idx()] || self.times[e.idx()] != t {
                continue;
            }
            debug_assert!(key >= last, "event {key:?} dequeued after {last:?}");
            last = key;
            self.inject_until(t);
            match self.net.event(e).kind {
                EventKind::Arrival => self.arrival(e),
                EventKind::Departure => self.departure(e),
            }
        }
        self.inject_until(Time::MAX);
    }

    fn ctx(&self, p: PaxId) -> Ctx<'a> {
        let a = &self.agents[p as usize];
        Ctx { net: self.net, prefs: self.cfg.prefs(a.pax.class), dest: a.pax.dest }
    }

    fn view(&self, p: PaxId) -> ExpectedView<'a> {
        ExpectedView {
            net: self.net,
            store: &self.agents[p as usize].store,
            lambda_std: self.cfg.lambda_std,
            weights: self.weights,
        }
    }

    fn inject_until(&mut self, t: Time) {
        let agents = self.agents;
        while let Some(a) = agents.get(self.next_start) {
            if a.pax.tau_start > t {
                break;
            }
            self.next_start += 1;
            let p = a.pax.id;
            let sc = StopContext::origin(a.pax.origin, a.pax.tau_start);
            let choice = {
                let (ctx, view) = (self.ctx(p), self.view(p));
                let processed = &self.processed;
                let rng = &mut self.pax[p as usize].rng;
                boarding_decision(&ctx, &a.profile, &view, &sc, &self.params, |e| !processed[e.idx()], rng)
            };
            self.adopt(p, sc, choice, false, a.pax.tau_start);
        }
    }

    /// Puts a boarding decision into effect for a passenger who is not waiting
    /// anywhere yet.
    fn adopt(&mut self, p: PaxId, sc: StopContext, choice: BoardingChoice, after_denial: bool, now: Time) {
        let prefs = self.ctx(p).prefs;
        let dest = self.agents[p as usize].pax.dest;
        let net = self.net;
        let px = &mut self.pax[p as usize];
        let j = &mut px.journey;
        j.end_stop = sc.stop;
        match choice {
            BoardingChoice::Walk { .. } => {
                let walk = if sc.stop == dest { 0 } else { net.footpath(sc.stop, dest).unwrap_or(0) };
                charge_walk(j, prefs, walk, after_denial);
                j.finished = true;
                j.end_stop = dest;
                j.arrival = Some(now.max(sc.since) + walk);
                px.phase = Phase::Done;
            }
            BoardingChoice::Stranded => px.phase = Phase::Stranded,
            BoardingChoice::Board(plan) => {
                let target = net.stop_of(plan.dep);
                let (sc, ready_at) = if target != sc.stop {
                    charge_walk(j, prefs, plan.walk, after_denial);
                    let since = sc.since + plan.walk;
                    j.end_stop = target;
                    (StopContext { stop: target, since, needs_mct: false, from_arrival: None, ..sc }, since)
                } else {
                    let min = if sc.needs_mct { net.stops[target.idx()].mct } else { 0 };
                    (sc, sc.since + min)
                };
                px.phase =
                    Phase::Waiting(Waiting { sc, plan: BoardingPlan { walk: 0, ..plan }, ready_at, after_denial });
                self.waiting[target.idx()].push(p);
            }
        }
    }

    fn waiting_state(&self, p: PaxId) -> Waiting {
        match self.pax[p as usize].phase {
            Phase::Waiting(w) => w,
            _ => unreachable!("passenger {p} is not waiting"),
        }
    }

    fn riding_state(&self, p: PaxId) -> Riding {
        match self.pax[p as usize].phase {
            Phase::Riding(r) => r,
            _ => unreachable!("passenger {p} is not riding"),
        }
    }

    fn unwait(&mut self, stop: StopId, p: PaxId) {
        let w = &mut self.waiting[stop.idx()];
        if let Some(i) = w.iter().position(|&x| x == p) {
            w.swap_remove(i);
        }
    }

    /// Cost of boarding `d` from `sc` with the current times of the given trips.
    fn rt_boarding_cost(&self, p: PaxId, sc: &StopContext, d: EventId, trips: [Option<TripId>; 2]) -> f64 {
        let (ctx, view) = (self.ctx(p), self.view(p));
        let profile = &self.agents[p as usize].profile;
        let rt = RtView::new(&view, self.net, &self.times, trips);
        let f = rt_departure_value(&ctx, profile, &rt, d, &self.processed);
        if !f.is_finite() {
            return INF;
        }
        crate::choice::boarding_cost(&ctx, &rt, sc, d, 0, f)
    }

    fn departure(&mut self, d: EventId) {
        let net = self.net;
        let ev = net.event(d);
        let (s, t) = (ev.stop, ev.trip);
        let now = self.times[d.idx()];

        let mut cands: Vec<PaxId> =
            self.waiting[s.idx()].iter().copied().filter(|&p| self.waiting_state(p).ready_at <= now).collect();
        cands.sort_unstable();
        let mut applicants = Vec::new();
        for p in cands {
            let mut w = self.waiting_state(p);
            let applies = if w.plan.dep == d {
                self.boarding_redo(p, &mut w, d, now)
            } else if Some(t) != w.sc.exclude_trip && t != net.event(w.plan.dep).trip {
                self.boarding_switch(p, &mut w, d, now)
            } else {
                false
            };
            if applies {
                self.pax[p as usize].phase = Phase::Waiting(w);
                applicants.push(p);
            }
        }

        let stayers: Vec<PaxId> = {
            let v = &self.vehicles[t.idx()];
            v.seated.iter().chain(&v.standing).copied().collect()
        };
        let mut rng = stream(self.cfg.seed, Tag::Departure, &[self.day as u64, d.0 as u64]);
        let out = process_stop(&mut self.vehicles[t.idx()], &[], &applicants, &mut rng);
        self.attempts[d.idx()] = applicants.len() as u32;
        self.denied[d.idx()] = out.denied.len() as u32;

        if ev.seq > 0 {
            let a = EventId(d.0 - 1);
            let dwell = now - self.times[a.idx()];
            let extra = dwell_delay(self.alighted[t.idx()], out.boarded.len(), net.trip(t).door_capacity, dwell);
            if extra > 0 {
                for e in propagate_delay(net, &mut self.times, &self.processed, d, now + extra) {
                    if e != d {
                        self.queue.push(Reverse((self.times[e.idx()], kind_key(net.event(e).kind), e.0)));
                    }
                }
            }
        }
        self.processed[d.idx()] = true;
        let now = self.times[d.idx()];

        let v = &self.vehicles[t.idx()];
        let onboard = v.onboard();
        if onboard > v.cap() || v.seated.len() > v.cap_sit() {
            self.violations += 1;
        }
        self.onboard[d.idx()] = onboard as u32;

        if ev.seq > 0 {
            let dur = (now - self.times[d.idx() - 1]) as f64;
            let load = onboard as f64 / v.cap_sit() as f64;
            for &p in &stayers {
                let seated = v.is_seated(p);
                let prefs = self.cfg.prefs(self.agents[p as usize].pax.class);
                let j = &mut self.pax[p as usize].journey;
                j.ledger.in_vehicle += dur;
                j.ledger.crowding += (prefs.crowding.factor(load, seated) - 1.0) * dur;
                if !seated {
                    j.standing += dur;
                }
            }
        }

        for &(p, seated) in &out.boarded {
            let w = self.waiting_state(p);
            self.unwait(s, p);
            let prefs = self.ctx(p).prefs;
            let j = &mut self.pax[p as usize].journey;
            let wait = prefs.beta_wait * (now - w.sc.since) as f64;
            j.ledger.wait += wait;
            if w.sc.penalty {
                j.ledger.transfer += prefs.beta_transfer;
            }
            if w.after_denial {
                j.ledger.denied += (prefs.beta_fail - 1.0) * wait;
            }
            let plan = {
                let (ctx, view) = (self.ctx(p), self.view(p));
                let profile = &self.agents[p as usize].profile;
                let rng = &mut self.pax[p as usize].rng;
                alighting_decision(&ctx, profile, &view, d, seated, &self.params, rng)
            };
            let plan = plan.unwrap_or(AlightingPlan {
                exit: net.trip(t).last_event(),
                cost: INF,
                best: INF,
                onward: None,
                expect_seat_from: None,
            });
            self.pax[p as usize].phase = Phase::Riding(Riding { board: d, plan });
        }

        for &p in &out.promoted {
            let r = self.riding_state(p);
            if r.plan.expect_seat_from.is_some_and(|x| x <= d) {
                continue;
            }
            self.counters.seat_redecisions.0 += 1;
            let plan = {
                let (ctx, view) = (self.ctx(p), self.view(p));
                let profile = &self.agents[p as usize].profile;
                let rng = &mut self.pax[p as usize].rng;
                alighting_decision(&ctx, profile, &view, d, true, &self.params, rng)
            };
            if let Some(plan) = plan {
                if plan.exit != r.plan.exit {
                    self.counters.seat_redecisions.1 += 1;
                }
                self.pax[p as usize].phase = Phase::Riding(Riding { plan, ..r });
            }
        }

        for &p in &out.denied {
            let w = self.waiting_state(p);
            self.unwait(s, p);
            let prefs = self.ctx(p).prefs;
            let j = &mut self.pax[p as usize].journey;
            j.denied.push(d);
            let wait = prefs.beta_wait * (now - w.sc.since) as f64;
            j.ledger.wait += wait;
            if w.after_denial {
                j.ledger.denied += (prefs.beta_fail - 1.0) * wait;
            }
            let sc = StopContext {
                stop: s,
                since: now,
                needs_mct: true,
                from_arrival: None,
                exclude_trip: None,
                penalty: w.sc.penalty,
            };
            let choice = {
                let (ctx, view) = (self.ctx(p), self.view(p));
                let processed = &self.processed;
                let rng = &mut self.pax[p as usize].rng;
                boarding_decision(
                    &ctx,
                    &self.agents[p as usize].profile,
                    &view,
                    &sc,
                    &self.params,
                    |e| !processed[e.idx()],
                    rng,
                )
            };
            self.adopt(p, sc, choice, true, now);
        }

        // Anyone still planning on `d` missed it and chooses again.
        let missed: Vec<PaxId> =
            self.waiting[s.idx()].iter().copied().filter(|&p| self.waiting_state(p).plan.dep == d).collect();
        for p in missed {
            let w = self.waiting_state(p);
            self.unwait(s, p);
            let choice = {
                let (ctx, view) = (self.ctx(p), self.view(p));
                let processed = &self.processed;
                let rng = &mut self.pax[p as usize].rng;
                boarding_decision(
                    &ctx,
                    &self.agents[p as usize].profile,
                    &view,
                    &w.sc,
                    &self.params,
                    |e| !processed[e.idx()],
                    rng,
                )
            };
            self.adopt(p, w.sc, choice, w.after_denial, now);
        }
    }

    /// The chosen departure is later than expected: choose again with its
    /// current time known. Returns whether the passenger still applies for `d`.
    fn boarding_redo(&mut self, p: PaxId, w: &mut Waiting, d: EventId, now: Time) -> bool {
        let view = self.view(p);
        use crate::ptt::CostView;
        if !boarding_redo_triggered(now, view.time(d)) {
            return true;
        }
        self.counters.boarding_redo.0 += 1;
        let ctx = self.ctx(p);
        let profile = &self.agents[p as usize].profile;
        let processed = &self.processed;
        let mut options = relevant_departures(&ctx, profile, &view, &w.sc, |e| !processed[e.idx()]);
        let rt_cost = self.rt_boarding_cost(p, &w.sc, d, [Some(self.net.event(d).trip), None]);
        match options.iter_mut().find(|o| o.dep == d) {
            Some(o) => o.cost = rt_cost,
            None => options.push(BoardingOption { dep: d, walk: 0, cost: rt_cost }),
        }
        let rng = &mut self.pax[p as usize].rng;
        let choice = decide_boarding(&options, ctx.walk_dest(w.sc.stop), &self.params, rng);
        match choice {
            BoardingChoice::Board(plan) if plan.dep == d => {
                w.plan = plan;
                true
            }
            BoardingChoice::Stranded => true,
            other => {
                self.counters.boarding_redo.1 += 1;
                let w = *w;
                self.unwait(w.sc.stop, p);
                self.adopt(p, w.sc, other, w.after_denial, now);
                false
            }
        }
    }

    /// A different trip's departure `d` may replace the plan. Returns whether
    /// the passenger now applies for `d`.
    fn boarding_switch(&mut self, p: PaxId, w: &mut Waiting, d: EventId, now: Time) -> bool {
        use crate::ptt::CostView;
        let net = self.net;
        let profile = &self.agents[p as usize].profile;
        if !profile.universe().is_boardable(d) {
            return false;
        }
        let view = self.view(p);
        let t = net.event(d).trip;
        let min = w.sc.reach(net, w.sc.stop).map_or(0, |x| x.0);
        let reasons = boarding_switch_reasons(
            now,
            view.time(d),
            self.vehicles[t.idx()].free() > 0,
            view.p_denied(d),
            net.tau_reg(d) >= w.sc.since + min,
            now,
            view.time(w.plan.dep),
        );
        if !reasons.any() {
            return false;
        }
        self.counters.boarding_switch.0 += 1;
        let trips = [Some(t), Some(net.event(w.plan.dep).trip)];
        let old = self.rt_boarding_cost(p, &w.sc, w.plan.dep, trips);
        let new = self.rt_boarding_cost(p, &w.sc, d, trips);
        let old_worse = old > w.plan.cost + 1e-9;
        let rng = &mut self.pax[p as usize].rng;
        match decide_switch(old, new, w.plan.optimal(), old_worse, &self.params, rng) {
            SwitchOutcome::Switched => {
                self.counters.boarding_switch.1 += 1;
                w.plan = BoardingPlan { dep: d, walk: 0, cost: new, best: w.plan.best.min(new) };
                true
            }
            _ => false,
        }
    }

    fn arrival(&mut self, a: EventId) {
        let net = self.net;
        let ev = net.event(a);
        let (s, t) = (ev.stop, ev.trip);
        let now = self.times[a.idx()];
        let last = net.trip(t).last_event() == a;

        let mut riders: Vec<PaxId> = {
            let v = &self.vehicles[t.idx()];
            v.seated.iter().chain(&v.standing).copied().collect()
        };
        riders.sort_unstable();
        {
            let v = &self.vehicles[t.idx()];
            let dur = (now - self.times[a.idx() - 1]) as f64;
            let load = riders.len() as f64 / v.cap_sit() as f64;
            for &p in &riders {
                let seated = v.is_seated(p);
                let prefs = self.cfg.prefs(self.agents[p as usize].pax.class);
                let j = &mut self.pax[p as usize].journey;
                j.ledger.in_vehicle += dur;
                j.ledger.crowding += (prefs.crowding.factor(load, seated) - 1.0) * dur;
                if !seated {
                    j.standing += dur;
                }
            }
        }

        let mut leaving = Vec::new();
        for p in riders {
            let mut r = self.riding_state(p);
            let seated = self.vehicles[t.idx()].is_seated(p);
            if r.plan.exit == a && !last {
                self.alighting_redo(p, &mut r, a, seated, now);
            } else if r.plan.exit > a && !last {
                self.alighting_switch(p, &mut r, a, seated, now);
            }
            self.pax[p as usize].phase = Phase::Riding(r);
            if last || r.plan.exit <= a {
                leaving.push(p);
            }
        }
        self.alighted[t.idx()] = self.vehicles[t.idx()].alight(&leaving);
        self.processed[a.idx()] = true;

        for p in leaving {
            let r = self.riding_state(p);
            let dest = self.agents[p as usize].pax.dest;
            let j = &mut self.pax[p as usize].journey;
            j.segments.push((r.board, a));
            j.end_stop = s;
            if s == dest {
                j.finished = true;
                j.arrival = Some(now);
                self.pax[p as usize].phase = Phase::Done;
                continue;
            }
            let sc = StopContext {
                stop: s,
                since: now,
                needs_mct: true,
                from_arrival: Some(a),
                exclude_trip: Some(t),
                penalty: true,
            };
            let choice = {
                let (ctx, view) = (self.ctx(p), self.view(p));
                let processed = &self.processed;
                let rng = &mut self.pax[p as usize].rng;
                boarding_decision(
                    &ctx,
                    &self.agents[p as usize].profile,
                    &view,
                    &sc,
                    &self.params,
                    |e| !processed[e.idx()],
                    rng,
                )
            };
            self.adopt(p, sc, choice, false, now);
        }
    }

    /// The planned onward boarding is no longer reachable: pick the exit again
    /// with the trip's current times.
    fn alighting_redo(&mut self, p: PaxId, r: &mut Riding, a: EventId, seated: bool, now: Time) {
        use crate::ptt::CostView;
        let Some(on) = r.plan.onward else { return };
        let net = self.net;
        let view = self.view(p);
        let min = net.min_transfer(net.stop_of(a), net.stop_of(on));
        let lost = self.processed[on.idx()] || min.is_none_or(|m| (now + m) as f64 > view.time(on));
        if !lost {
            return;
        }
        self.counters.alighting_redo.0 += 1;
        let ctx = self.ctx(p);
        let profile = &self.agents[p as usize].profile;
        let rt = RtView::new(&view, net, &self.times, [Some(net.event(a).trip), None]);
        let opts = rt_ride_options(&ctx, profile, &rt, a, seated, &self.processed);
        if opts.is_empty() {
            return;
        }
        let costs: Vec<f64> = opts.iter().map(|o| o.1).collect();
        let best = costs.iter().copied().fold(INF, f64::min);
        let rng = &mut self.pax[p as usize].rng;
        let (exit, cost) = opts[softmax_select(&costs, &self.params, rng)];
        if exit != a {
            self.counters.alighting_redo.1 += 1;
        }
        r.plan = plan_for_exit(&ctx, profile, &view, a, seated, exit, cost, best);
        if exit == a {
            r.plan.onward = rt_alight(&ctx, profile, &rt, a, &self.processed).1;
        }
    }

    /// Getting off here instead of at the planned exit may have become better.
    fn alighting_switch(&mut self, p: PaxId, r: &mut Riding, a: EventId, seated: bool, now: Time) {
        use crate::ptt::CostView;
        let net = self.net;
        let view = self.view(p);
        let profile = &self.agents[p as usize].profile;
        if !profile.universe().is_exit(a) {
            return;
        }
        let exit = r.plan.exit;
        let lost =
            r.plan.onward.is_some_and(|on| onward_lost(net, &view, exit, self.times[exit.idx()], on, &self.processed));
        let reasons = AlightingSwitchReasons {
            earlier_than_expected: (now as f64) < view.time(a),
            onward_lost: lost,
            unexpectedly_standing: !seated && r.plan.expect_seat_from.is_some_and(|x| x.0 < a.0),
        };
        if !reasons.any() {
            return;
        }
        self.counters.alighting_switch.0 += 1;
        let ctx = self.ctx(p);
        let rt = RtView::new(&view, net, &self.times, [Some(net.event(a).trip), None]);
        let ride = ride_costs(&ctx, &rt, a, seated, Some(exit)).last().map_or(0.0, |x| x.1);
        let old = ride + rt_alight(&ctx, profile, &rt, exit, &self.processed).0;
        let (new, onward) = rt_alight(&ctx, profile, &rt, a, &self.processed);
        let rng = &mut self.pax[p as usize].rng;
        if decide_switch(old, new, r.plan.optimal(), lost, &self.params, rng) == SwitchOutcome::Switched {
            self.counters.alighting_switch.1 += 1;
            r.plan = AlightingPlan {
                exit: a,
                cost: new,
                best: r.plan.best.min(new),
                onward,
                expect_seat_from: r.plan.expect_seat_from,
            };
        }
    }

    fn finish(mut self) -> DayResult {
        let net = self.net;
        for (i, px) in self.pax.iter_mut().enumerate() {
            let a = &self.agents[i];
            let j = &mut px.journey;
            if let Phase::Riding(r) = px.phase {
                let trip = net.event(r.board).trip;
                let last_seen = (r.board.0 + 1..=net.trip(trip).last_event().0)
                    .step_by(2)
                    .map(EventId)
                    .take_while(|e| self.processed[e.idx()])
                    .last();
                if let Some(x) = last_seen {
                    j.segments.push((r.board, x));
                    j.end_stop = net.stop_of(x);
                }
            }
            if !j.finished {
                j.ledger.unfinished =
                    self.cfg.prefs(a.pax.class).unfinished_scale * net.distance(j.end_stop, a.pax.dest);
            }
        }
        let n = net.events.len();
        let mut loads = vec![0.0; n];
        let mut p_denied = vec![0.0; n];
        for (i, e) in net.events.iter().enumerate() {
            if e.kind == EventKind::Departure {
                loads[i] = self.onboard[i] as f64 / net.trip(e.trip).cap_sit as f64;
                if self.attempts[i] > 0 {
                    p_denied[i] = self.denied[i] as f64 / self.attempts[i] as f64;
                }
            }
        }
        let journeys: Vec<Journey> = self.pax.into_iter().map(|p| p.journey).collect();
        let mut report = DayReport::from_journeys(self.day, &journeys);
        report.realtime = self.counters;
        let delays = self.times.iter().zip(&net.events).map(|(&t, e)| t - e.tau_reg);
        report.delayed_events = delays.clone().filter(|&x| x > 0).count();
        report.max_delay = delays.max().unwrap_or(0);
        DayResult {
            report,
            record: DayRecord { loads, p_denied, times: self.times },
            onboard: self.onboard,
            denied: self.denied,
            journeys,
            capacity_violations: self.violations,
        }
    }
}

fn charge_walk(j: &mut Journey, prefs: &crate::demand::PreferenceSet, walk: Time, after_denial: bool) {
    let w = prefs.beta_walk * walk as f64;
    j.ledger.walk += w;
    if after_denial {
        j.ledger.denied += (prefs.beta_fail - 1.0) * w;
    }
}
