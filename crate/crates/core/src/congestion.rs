//! Vehicle-side dynamics: seat allocation, capacity-limited boarding, dwell
//! delays and their propagation along trips and dependency arcs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::network::{EventId, Network, Time, Trip, TripId};

pub type PaxId = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct VehicleState {
    pub trip: TripId,
    pub seated: Vec<PaxId>,
    pub standing: Vec<PaxId>,
    /// Current delay of the latest event of the trip.
    pub delay: Time,
    cap_sit: usize,
    cap: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoardingOutcome {
    /// Boarded passengers in boarding order, with whether they got a seat.
    pub boarded: Vec<(PaxId, bool)>,
    pub denied: Vec<PaxId>,
    /// Standing passengers who took a freed seat before boarding began.
    pub promoted: Vec<PaxId>,
}

impl VehicleState {
    pub fn new(id: TripId, trip: &Trip) -> Self {
        let cap = if trip.is_unlimited() { usize::MAX } else { trip.cap as usize };
        VehicleState {
            trip: id,
            seated: Vec::new(),
            standing: Vec::new(),
            delay: 0,
            cap_sit: trip.cap_sit as usize,
            cap,
        }
    }

    pub fn onboard(&self) -> usize {
        self.seated.len() + self.standing.len()
    }

    pub fn free(&self) -> usize {
        self.cap - self.onboard()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn cap_sit(&self) -> usize {
        self.cap_sit
    }

    pub fn is_seated(&self, p: PaxId) -> bool {
        self.seated.contains(&p)
    }

    /// Removes `leaving` from the vehicle; returns how many were on board.
    pub fn alight(&mut self, leaving: &[PaxId]) -> usize {
        let before = self.onboard();
        self.seated.retain(|p| !leaving.contains(p));
        self.standing.retain(|p| !leaving.contains(p));
        before - self.onboard()
    }

    /// Standing passengers drawn at random take free seats.
    pub fn promote<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<PaxId> {
        let mut promoted = Vec::new();
        while self.seated.len() < self.cap_sit && !self.standing.is_empty() {
            let i = rng.gen_range(0..self.standing.len());
            let p = self.standing.swap_remove(i);
            self.seated.push(p);
            promoted.push(p);
        }
        promoted
    }

    /// Applicants board in the given order, seated while seats last, until the
    /// vehicle is full.
    pub fn board(&mut self, applicants: &[PaxId]) -> BoardingOutcome {
        let mut out = BoardingOutcome::default();
        for &p in applicants {
            if self.onboard() >= self.cap {
                out.denied.push(p);
            } else if self.seated.len() < self.cap_sit {
                self.seated.push(p);
                out.boarded.push((p, true));
            } else {
                self.standing.push(p);
                out.boarded.push((p, false));
            }
        }
        out
    }
}

/// Alighting, seat promotion, then boarding of the applicants in random order.
pub fn process_stop<R: Rng + ?Sized>(
    v: &mut VehicleState,
    alighting: &[PaxId],
    applicants: &[PaxId],
    rng: &mut R,
) -> BoardingOutcome {
    v.alight(alighting);
    let promoted = v.promote(rng);
    let mut order = applicants.to_vec();
    order.shuffle(rng);
    let mut out = v.board(&order);
    out.promoted = promoted;
    out
}

/// Whole seconds by which boarding and alighting overrun the available dwell.
pub fn dwell_delay(q_alight: usize, q_board: usize, door_capacity: f64, dwell: Time) -> Time {
    let moves = (q_alight + q_board) as f64;
    if moves == 0.0 {
        return 0;
    }
    let required = (moves / door_capacity - 1e-9).ceil() as Time;
    (required - dwell).max(0)
}

/// Moves `from` to at least `time` and pushes later events of its trip, each
/// activity shrinking no further than its minimum duration. A late final
/// arrival pushes successor trips through their dependency arcs. Only events
/// not yet `processed` move, apart from `from` itself. Returns the events whose
/// time changed.
pub fn propagate_delay(
    net: &Network,
    times: &mut [Time],
    processed: &[bool],
    from: EventId,
    time: Time,
) -> Vec<EventId> {
    let mut changed = Vec::new();
    if time <= times[from.idx()] {
        return changed;
    }
    times[from.idx()] = time;
    changed.push(from);
    let mut stack = vec![from];
    while let Some(start) = stack.pop() {
        let trip = net.trip_of(start);
        let last = trip.last_event();
        let mut e = start;
        let mut reached_end = e == last;
        while e < last {
            let n = EventId(e.0 + 1);
            let t = times[e.idx()] + net.event(e).min_next;
            if processed[n.idx()] || t <= times[n.idx()] {
                break;
            }
            times[n.idx()] = t;
            changed.push(n);
            e = n;
            reached_end = e == last;
        }
        if reached_end {
            for &(succ, turn) in &trip.successors {
                let first = net.trip(succ).first_event;
                let t = times[last.idx()] + turn;
                if !processed[first.idx()] && t > times[first.idx()] {
                    times[first.idx()] = t;
                    changed.push(first);
                    stack.push(first);
                }
            }
        }
    }
    changed
}
