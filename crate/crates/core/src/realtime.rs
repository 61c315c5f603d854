//! Real-time re-decisions: trigger conditions for boarding and alighting
//! changes, evaluation of options under current trip times, and the rules
//! that decide whether a switch may happen.

use rand::Rng;

use crate::choice::{softmax_select, ChoiceParams};
use crate::network::{EventId, Network, Time, TripId};
use crate::ptt::{p_fail, ptt_transfer, ride_costs, CostView, Ctx, Profile, INF};

/// Expected values with the current times of up to two trips laid over them.
/// Delay risk is zero: the times of those trips are known.
pub struct RtView<'a, V> {
    pub base: &'a V,
    pub net: &'a Network,
    pub current: &'a [Time],
    pub trips: [Option<TripId>; 2],
}

impl<'a, V: CostView> RtView<'a, V> {
    pub fn new(base: &'a V, net: &'a Network, current: &'a [Time], trips: [Option<TripId>; 2]) -> Self {
        RtView { base, net, current, trips }
    }

    #[inline]
    fn overlaid(&self, e: EventId) -> bool {
        let t = self.net.event(e).trip;
        self.trips.contains(&Some(t))
    }
}

impl<V: CostView> CostView for RtView<'_, V> {
    fn time(&self, e: EventId) -> f64 {
        if self.overlaid(e) {
            self.current[e.idx()] as f64
        } else {
            self.base.time(e)
        }
    }
    fn load(&self, dep: EventId) -> f64 {
        self.base.load(dep)
    }
    fn p_denied(&self, dep: EventId) -> f64 {
        self.base.p_denied(dep)
    }
    fn p_delay(&self, _arr: EventId, _threshold: f64) -> f64 {
        0.0
    }
}

/// Cost of getting off at `a` under `view`: walk to the destination or the
/// best boarding still to come whose time under `view` allows the transfer.
pub fn rt_alight<V: CostView>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    a: EventId,
    processed: &[bool],
) -> (f64, Option<EventId>) {
    let net = ctx.net;
    let u = profile.universe();
    let s = net.stop_of(a);
    let t = net.event(a).trip;
    let ta = view.time(a);
    let mut best = (ctx.walk_dest(s), None);
    let same = std::iter::once((s, net.stops[s.idx()].mct, 0));
    let others = net.footpaths_from(s).iter().filter(|&&(s2, _)| !u.is_blocked(a, s2)).map(|&(s2, l)| (s2, l, l));
    for (s2, min, walk) in same.chain(others) {
        for &d in u.deps_at(s2) {
            if processed[d.idx()] || net.event(d).trip == t {
                continue;
            }
            let td = view.time(d);
            if td < ta + min as f64 {
                continue;
            }
            let Some(f) = profile.f_dep(d) else { continue };
            let pf = p_fail(view.p_denied(d), 0.0);
            let c = f + ptt_transfer(ctx.prefs, net.headway(d), pf, td - ta - walk as f64, walk as f64, true);
            if c < best.0 {
                best = (c, Some(d));
            }
        }
    }
    best
}

/// Exits from `from` onward with their cost under `view`; an arrival `from`
/// is itself the first option.
pub fn rt_ride_options<V: CostView>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    from: EventId,
    seated: bool,
    processed: &[bool],
) -> Vec<(EventId, f64)> {
    let u = profile.universe();
    ride_costs(ctx, view, from, seated, None)
        .into_iter()
        .filter(|&(a, _)| u.is_exit(a))
        .map(|(a, ride)| (a, ride + rt_alight(ctx, profile, view, a, processed).0))
        .filter(|x| x.1.is_finite())
        .collect()
}

/// Cost of boarding `d` under `view` and riding on optimally.
pub fn rt_departure_value<V: CostView>(
    ctx: &Ctx<'_>,
    profile: &Profile,
    view: &V,
    d: EventId,
    processed: &[bool],
) -> f64 {
    rt_ride_options(ctx, profile, view, d, false, processed).iter().map(|x| x.1).fold(INF, f64::min)
}

/// The departing chosen trip is later than expected.
pub fn boarding_redo_triggered(current: Time, expected: f64) -> bool {
    current as f64 > expected
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoardingSwitchReasons {
    pub earlier_than_expected: bool,
    pub free_despite_risk: bool,
    pub not_regular: bool,
    pub choice_late: bool,
}

impl BoardingSwitchReasons {
    pub fn any(&self) -> bool {
        self.earlier_than_expected || self.free_despite_risk || self.not_regular || self.choice_late
    }
}

#[allow(clippy::too_many_arguments)]
pub fn boarding_switch_reasons(
    current: Time,
    expected: f64,
    free_capacity: bool,
    p_denied: f64,
    regularly_valid: bool,
    now: Time,
    expected_choice: f64,
) -> BoardingSwitchReasons {
    BoardingSwitchReasons {
        earlier_than_expected: (current as f64) < expected,
        free_despite_risk: free_capacity && p_denied > 0.0,
        not_regular: !regularly_valid,
        choice_late: now as f64 > expected_choice,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AlightingSwitchReasons {
    pub earlier_than_expected: bool,
    pub onward_lost: bool,
    pub unexpectedly_standing: bool,
}

impl AlightingSwitchReasons {
    pub fn any(&self) -> bool {
        self.earlier_than_expected || self.onward_lost || self.unexpectedly_standing
    }
}

/// Whether the planned onward boarding `dep` is out of reach after reaching
/// the exit `exit` at `exit_time`.
pub fn onward_lost<V: CostView>(
    net: &Network,
    view: &V,
    exit: EventId,
    exit_time: Time,
    dep: EventId,
    processed: &[bool],
) -> bool {
    if processed[dep.idx()] {
        return true;
    }
    match net.min_transfer(net.stop_of(exit), net.stop_of(dep)) {
        Some(m) => (exit_time + m) as f64 > view.time(dep),
        None => true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchOutcome {
    NotAllowed,
    Kept,
    Switched,
}

/// Binary decision between keeping the current choice (`old`) and switching
/// (`new`). A switch needs `new ≤ old`; a choice that was suboptimal when made
/// is kept unless it has become worse than expected.
pub fn decide_switch<R: Rng + ?Sized>(
    old: f64,
    new: f64,
    original_optimal: bool,
    old_worse_than_expected: bool,
    params: &ChoiceParams,
    rng: &mut R,
) -> SwitchOutcome {
    if !(new <= old) || !(original_optimal || old_worse_than_expected) {
        return SwitchOutcome::NotAllowed;
    }
    if !old.is_finite() || softmax_select(&[old, new], params, rng) == 1 {
        SwitchOutcome::Switched
    } else {
        SwitchOutcome::Kept
    }
}

/// Per-routine counts of evaluations and changed decisions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RealtimeCounters {
    pub boarding_redo: (u64, u64),
    pub boarding_switch: (u64, u64),
    pub alighting_redo: (u64, u64),
    pub alighting_switch: (u64, u64),
    pub seat_redecisions: (u64, u64),
}

impl RealtimeCounters {
    pub fn triggered(&self) -> u64 {
        self.boarding_redo.0
            + self.boarding_switch.0
            + self.alighting_redo.0
            + self.alighting_switch.0
            + self.seat_redecisions.0
    }

    pub fn changed(&self) -> u64 {
        self.boarding_redo.1
            + self.boarding_switch.1
            + self.alighting_redo.1
            + self.alighting_switch.1
            + self.seat_redecisions.1
    }
}
