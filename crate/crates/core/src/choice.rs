//! Stochastic decisions from perceived travel times (ε-greedy mixed with
//! SoftMax), relevant departures at a stop, and the static reduction of a
//! passenger's choice set.

use rand::Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::network::{EventId, EventKind, LineId, Network, StopId, Time, TripId};
use crate::ptt::{
    p_fail, ptt_activity, ptt_transfer, ride_costs, CostView, Ctx, InitialProfile, Profile, Universe, INF,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiceParams {
    pub gamma: f64,
    pub epsilon: f64,
}

impl ChoiceParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(format!("epsilon must lie in [0, 1], got {}", self.epsilon));
        }
        Ok(())
    }
}

fn min_cost(costs: &[f64]) -> f64 {
    assert!(!costs.is_empty(), "choice needs at least one option");
    costs.iter().copied().fold(INF, f64::min)
}

/// p(a) ∝ exp((f_opt − f(a)) / γ).
pub fn softmax_probabilities(costs: &[f64], gamma: f64) -> Vec<f64> {
    let best = min_cost(costs);
    let w: Vec<f64> = costs.iter().map(|&c| ((best - c) / gamma).exp()).collect();
    let sum: f64 = w.iter().sum();
    w.into_iter().map(|x| x / sum).collect()
}

/// Selection probabilities of the mixed rule; exact ties share the greedy mass.
pub fn choice_probabilities(costs: &[f64], params: &ChoiceParams) -> Vec<f64> {
    let best = min_cost(costs);
    let n_best = costs.iter().filter(|&&c| c == best).count() as f64;
    softmax_probabilities(costs, params.gamma)
        .into_iter()
        .zip(costs)
        .map(|(p, &c)| params.epsilon * p + if c == best { (1.0 - params.epsilon) / n_best } else { 0.0 })
        .collect()
}

/// Index of the chosen option: the cheapest with probability 1 − ε (uniform
/// among exact ties), otherwise a SoftMax draw.
pub fn softmax_select<R: Rng + ?Sized>(costs: &[f64], params: &ChoiceParams, rng: &mut R) -> usize {
    let best = min_cost(costs);
    assert!(best.is_finite() && costs.iter().all(|c| c.is_finite()), "choice costs must be finite");
    let explore = rng.gen::<f64>() < params.epsilon;
    if !explore {
        let ties: Vec<usize> = (0..costs.len()).filter(|&i| costs[i] == best).collect();
        return if ties.len() == 1 { ties[0] } else { ties[rng.gen_range(0..ties.len())] };
    }
    let p = softmax_probabilities(costs, params.gamma);
    let u = rng.gen::<f64>();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

/// Where and how a passenger waits for a boarding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopContext {
    pub stop: StopId,
    /// Time the passenger reached the stop.
    pub since: Time,
    /// Whether same-stop boardings need the stop's minimum transfer time.
    pub needs_mct: bool,
    /// Arrival just left; its blocked footpaths are unavailable.
    pub from_arrival: Option<EventId>,
    pub exclude_trip: Option<TripId>,
    /// Whether the next boarding is a transfer between trips.
    pub penalty: bool,
}

impl StopContext {
    pub fn origin(stop: StopId, since: Time) -> Self {
        StopContext { stop, since, needs_mct: false, from_arrival: None, exclude_trip: None, penalty: false }
    }

    /// Minimum time between `since` and a boarding at `s2`, with the walk it needs.
    pub fn reach(&self, net: &Network, s2: StopId) -> Option<(Time, Time)> {
        if s2 == self.stop {
            Some((if self.needs_mct { net.stops[s2.idx()].mct } else { 0 }, 0))
        } else {
            net.footpath(self.stop, s2).map(|l| (l, l))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoardingOption {
    pub dep: EventId,
    pub walk: Time,
    pub cost: f64,
}

/// Cost of waiting at `sc` and boarding `dep` after walking `walk` seconds;
/// delay risk is zero because the passenger is already at the stop.
pub fn boarding_cost<V: CostView>(
    ctx: &Ctx<'_>,
    view: &V,
    sc: &StopContext,
    dep: EventId,
    walk: Time,
    f_dep: f64,
) -> f64 {
    let wait = view.time(dep) - sc.since as f64 - walk as f64;
    let pf = p_fail(view.p_denied(dep), 0.0);
    f_dep + ptt_transfer(ctx.prefs, ctx.net.headway(dep), pf, wait, walk as f64, sc.penalty)
}

/// The earliest departure per line and stop position that is valid under the
/// regular timetable, reachable from `sc`, not filtered out and accepted by
/// `available`; sorted by scheduled time.
pub fn relevant_departures<V: CostView>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    sc: &StopContext,
    available: impl Fn(EventId) -> bool,
) -> Vec<BoardingOption> {
    let net = ctx.net;
    let u = profile.universe();
    let mut best: FxHashMap<(LineId, u32), (Time, EventId, Time, f64)> = FxHashMap::default();
    let fps = net.footpaths_from(sc.stop).iter().map(|&(s2, _)| s2);
    for s2 in std::iter::once(sc.stop).chain(fps) {
        if s2 != sc.stop && sc.from_arrival.is_some_and(|a| u.is_blocked(a, s2)) {
            continue;
        }
        let Some((min, walk)) = sc.reach(net, s2) else { continue };
        let deps = u.deps_at(s2);
        let from = deps.partition_point(|&d| net.tau_reg(d) < sc.since + min);
        for &d in &deps[from..] {
            let ev = net.event(d);
            if Some(ev.trip) == sc.exclude_trip || !available(d) {
                continue;
            }
            let Some(f) = profile.f_dep(d) else { continue };
            let key = (net.trip(ev.trip).line, ev.seq);
            let cand = (ev.tau_reg, d, walk, f);
            match best.get(&key) {
                Some(&(t, e, _, _)) if (t, e) <= (ev.tau_reg, d) => {}
                _ => {
                    best.insert(key, cand);
                }
            }
        }
    }
    let mut out: Vec<_> = best.into_values().collect();
    out.sort_by_key(|&(t, d, _, _)| (t, d));
    out.into_iter()
        .map(|(_, dep, walk, f)| BoardingOption { dep, walk, cost: boarding_cost(ctx, view, sc, dep, walk, f) })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoardingPlan {
    pub dep: EventId,
    pub walk: Time,
    pub cost: f64,
    /// Cheapest ride option at decision time.
    pub best: f64,
}

impl BoardingPlan {
    pub fn optimal(&self) -> bool {
        self.cost <= self.best
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoardingChoice {
    Walk { cost: f64 },
    Board(BoardingPlan),
    Stranded,
}

/// Walk-or-ride first, then one of the ride options; each stage has its own draw.
pub fn decide_boarding<R: Rng + ?Sized>(
    options: &[BoardingOption],
    walk: f64,
    params: &ChoiceParams,
    rng: &mut R,
) -> BoardingChoice {
    let ride = options.iter().map(|o| o.cost).fold(INF, f64::min);
    match (walk.is_finite(), ride.is_finite()) {
        (false, false) => return BoardingChoice::Stranded,
        (true, false) => return BoardingChoice::Walk { cost: walk },
        (true, true) if softmax_select(&[walk, ride], params, rng) == 0 => return BoardingChoice::Walk { cost: walk },
        _ => {}
    }
    let options: Vec<&BoardingOption> = options.iter().filter(|o| o.cost.is_finite()).collect();
    let costs: Vec<f64> = options.iter().map(|o| o.cost).collect();
    let o = options[softmax_select(&costs, params, rng)];
    BoardingChoice::Board(BoardingPlan { dep: o.dep, walk: o.walk, cost: o.cost, best: ride })
}

/// Boarding decision at a stop.
pub fn boarding_decision<V: CostView, R: Rng + ?Sized>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    sc: &StopContext,
    params: &ChoiceParams,
    available: impl Fn(EventId) -> bool,
    rng: &mut R,
) -> BoardingChoice {
    let options = relevant_departures(ctx, profile, view, sc, available);
    decide_boarding(&options, ctx.walk_dest(sc.stop), params, rng)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlightingPlan {
    pub exit: EventId,
    pub cost: f64,
    pub best: f64,
    /// Optimal onward boarding after the exit, if a transfer beats walking.
    pub onward: Option<EventId>,
    /// Departure of the first arc on which a seat was expected.
    pub expect_seat_from: Option<EventId>,
}

impl AlightingPlan {
    pub fn optimal(&self) -> bool {
        self.cost <= self.best
    }
}

/// Exits downstream of `from` (a departure, or an arrival that is itself an
/// option) with their total expected cost.
pub fn alighting_options<V: CostView>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    from: EventId,
    seated: bool,
) -> Vec<(EventId, f64)> {
    ride_costs(ctx, view, from, seated, None)
        .into_iter()
        .filter_map(|(a, ride)| profile.f_arr(a).map(|f| (a, ride + f)))
        .filter(|o| o.1.is_finite())
        .collect()
}

/// First departure at or after `from`, up to `exit`, at which a seat is expected.
pub fn expected_seat<V: CostView>(
    net: &Network,
    view: &V,
    from: EventId,
    exit: EventId,
    seated: bool,
) -> Option<EventId> {
    if seated {
        return Some(from);
    }
    let start = if net.event(from).kind == EventKind::Departure { from.0 } else { from.0 + 1 };
    (start..exit.0).step_by(2).map(EventId).find(|&d| view.load(d) < 1.0)
}

/// Picks an exit among `options`; `None` when there is none.
pub fn alighting_decision<V: CostView, R: Rng + ?Sized>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    from: EventId,
    seated: bool,
    params: &ChoiceParams,
    rng: &mut R,
) -> Option<AlightingPlan> {
    let options = alighting_options(ctx, profile, view, from, seated);
    if options.is_empty() {
        return None;
    }
    let costs: Vec<f64> = options.iter().map(|o| o.1).collect();
    let (exit, cost) = options[softmax_select(&costs, params, rng)];
    Some(plan_for_exit(ctx, profile, view, from, seated, exit, cost, min_cost(&costs)))
}

#[allow(clippy::too_many_arguments)]
pub fn plan_for_exit<V: CostView>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    from: EventId,
    seated: bool,
    exit: EventId,
    cost: f64,
    best: f64,
) -> AlightingPlan {
    let tr = profile.best_transfer(ctx, view, exit);
    let onward = if tr.cost < ctx.walk_dest(ctx.net.stop_of(exit)) { tr.dep } else { None };
    AlightingPlan { exit, cost, best, onward, expect_seat_from: expected_seat(ctx.net, view, from, exit, seated) }
}

/// Boardings, exits and footpaths that survive the reduction rules.
#[derive(Clone, Debug, Default)]
pub struct ReductionRules {
    pub boardable: FxHashSet<EventId>,
    pub exits: FxHashSet<EventId>,
    pub blocked: FxHashSet<(EventId, StopId)>,
    /// Per departure: perceived time of the best plan that boards it or waits
    /// at its stop for a later departure.
    pub stay_value: FxHashMap<EventId, f64>,
}

fn initial_ride(ctx: &Ctx<'_>, lambda_std: f64, d: EventId) -> Vec<(EventId, f64)> {
    let net = ctx.net;
    let seated = lambda_std < 1.0;
    let trip = net.trip_of(d);
    let last = trip.last_event();
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut e = d;
    while e < last {
        let n = EventId(e.0 + 1);
        acc += ptt_activity(ctx.prefs, lambda_std, seated, (net.tau_reg(n) - net.tau_reg(e)) as f64);
        if net.event(n).kind == EventKind::Arrival {
            out.push((n, acc));
        }
        e = n;
    }
    out
}

/// Best transfer out of `a` under the initial values, with the chosen departure.
fn initial_transfer(ctx: &Ctx<'_>, f0: &[f64], a: EventId, only_to: Option<StopId>) -> (f64, Option<EventId>) {
    let net = ctx.net;
    let prefs = ctx.prefs;
    let t = net.event(a).trip;
    let s = net.stop_of(a);
    let ta = net.tau_reg(a);
    let mut best = (INF, None);
    let same = std::iter::once((s, net.stops[s.idx()].mct, 0));
    for (s2, min, walk) in same.chain(net.footpaths_from(s).iter().map(|&(s2, l)| (s2, l, l))) {
        if only_to.is_some_and(|o| o != s2) {
            continue;
        }
        let deps = net.departures_at(s2);
        let from = deps.partition_point(|&d| net.tau_reg(d) < ta + min);
        for &d in &deps[from..] {
            let fd = f0[d.idx()];
            if fd == INF || net.event(d).trip == t {
                continue;
            }
            let wait = (net.tau_reg(d) - ta - walk) as f64;
            let c = fd + prefs.beta_transfer + prefs.beta_wait * wait + prefs.beta_walk * walk as f64;
            if c < best.0 {
                best = (c, Some(d));
            }
        }
    }
    best
}

/// Events of the cheapest journey that starts by boarding `d`, under initial values.
fn initial_journey_events(ctx: &Ctx<'_>, f0: &[f64], lambda_std: f64, d: EventId) -> FxHashSet<EventId> {
    let net = ctx.net;
    let mut events = FxHashSet::default();
    let mut dep = d;
    for _ in 0..net.trips.len() {
        let mut exit = None;
        let mut best = INF;
        for (a, ride) in initial_ride(ctx, lambda_std, dep) {
            let c = ride + f0[a.idx()];
            if c < best {
                best = c;
                exit = Some(a);
            }
        }
        let Some(a) = exit else { break };
        events.extend((dep.0..=a.0).map(EventId));
        let (tr, next) = initial_transfer(ctx, f0, a, None);
        match next {
            Some(n) if tr < ctx.walk_dest(net.stop_of(a)) && !events.contains(&n) => dep = n,
            _ => break,
        }
    }
    events
}

/// Applies the reduction rules to the initial values of one passenger.
pub fn reduction_rules(ctx: &Ctx<'_>, ip: &InitialProfile, lambda_std: f64) -> ReductionRules {
    let net = ctx.net;
    let prefs = ctx.prefs;
    let f0 = &ip.f0;
    let mut rules = ReductionRules::default();

    // Candidate boardings per stop, ascending by scheduled time.
    let mut at_stop: FxHashMap<StopId, Vec<EventId>> = FxHashMap::default();
    for &d in &ip.arcs {
        if f0[d.idx()].is_finite() {
            at_stop.entry(net.stop_of(d)).or_default().push(d);
        }
    }
    let mut stay: FxHashMap<EventId, (f64, Option<EventId>)> = FxHashMap::default();
    for deps in at_stop.values_mut() {
        deps.sort_by_key(|&d| (net.tau_reg(d), d));
        for (i, &d) in deps.iter().enumerate() {
            let td = net.tau_reg(d);
            let mut v = (f0[d.idx()], None);
            let same_time = deps[..i].iter().rev().take_while(|&&x| net.tau_reg(x) == td);
            for &d2 in same_time.chain(deps[i + 1..].iter()) {
                let c = prefs.beta_wait * (net.tau_reg(d2) - td) as f64 + f0[d2.idx()];
                if c < v.0 {
                    v = (c, Some(d2));
                }
            }
            stay.insert(d, v);
        }
    }

    // Rules 2 and 4, then rule 3 along each trip.
    let mut trips: Vec<TripId> = ip.arcs.iter().map(|&d| net.event(d).trip).collect();
    trips.sort_unstable();
    trips.dedup();
    for t in trips {
        let trip = net.trip(t);
        let n = trip.n_stops;
        // Suffix minimum of exit values along the trip.
        let mut suffix = vec![INF; n as usize + 1];
        for j in (1..n).rev() {
            suffix[j as usize] = suffix[j as usize + 1].min(f0[trip.arr(j).idx()]);
        }
        let mut running = f64::NEG_INFINITY;
        for j in 0..n {
            if j > 0 {
                let a = trip.arr(j);
                let fa = f0[a.idx()];
                if running > f64::NEG_INFINITY && fa.is_finite() && fa <= running {
                    rules.exits.insert(a);
                    let s = net.stop_of(a);
                    for &(s2, _) in net.footpaths_from(s) {
                        if s2 != ctx.dest && initial_transfer(ctx, f0, a, Some(s2)).0 > running {
                            rules.blocked.insert((a, s2));
                        }
                    }
                }
            }
            if j + 1 == n {
                break;
            }
            let d = trip.dep(j);
            let Some(&(v, star)) = stay.get(&d) else { continue };
            rules.stay_value.insert(d, v);
            if suffix[j as usize + 1] > v {
                continue;
            }
            if let Some(star) = star {
                if v < f0[d.idx()] && initial_journey_events(ctx, f0, lambda_std, d).contains(&star) {
                    continue;
                }
            }
            rules.boardable.insert(d);
            running = running.max(v);
        }
    }
    rules
}

/// Filters the passenger's events and keeps only what stays reachable from
/// the origin under the regular timetable.
pub fn reduce_choice_set(
    ctx: &Ctx<'_>,
    ip: &InitialProfile,
    origin: StopId,
    tau_start: Time,
    lambda_std: f64,
) -> Universe {
    let net = ctx.net;
    if ip.earliest_arrival.is_none() {
        return Universe::new(net, Vec::new(), |_| false, |_| false, FxHashSet::default(), ip.horizon);
    }
    let rules = reduction_rules(ctx, ip, lambda_std);
    let arcs = crate::ptt::forward_sweep(
        net,
        origin,
        tau_start,
        ip.horizon,
        |d| rules.boardable.contains(&d),
        |a| rules.exits.contains(&a),
        |a, s2| !rules.blocked.contains(&(a, s2)),
    );
    let kept: FxHashSet<EventId> = arcs.iter().copied().collect();
    Universe::new(
        net,
        arcs,
        |d| rules.boardable.contains(&d),
        |a| rules.exits.contains(&a) && kept.contains(&EventId(a.0 - 1)),
        rules.blocked,
        ip.horizon,
    )
}
