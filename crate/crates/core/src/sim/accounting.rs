//! Per-passenger journeys, their perceived-time ledger and the daily summary.

use crate::network::{EventId, StopId, Time};
use crate::realtime::RealtimeCounters;

/// Perceived seconds of one passenger-day by component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Ledger {
    /// Raw riding and dwelling time.
    pub in_vehicle: f64,
    /// Weighted waiting time.
    pub wait: f64,
    /// Weighted walking time.
    pub walk: f64,
    pub transfer: f64,
    /// In-vehicle time times (crowding factor − 1).
    pub crowding: f64,
    /// Extra weight on waiting and walking after a denied boarding.
    pub denied: f64,
    pub unfinished: f64,
}

impl Ledger {
    pub fn total(&self) -> f64 {
        self.in_vehicle + self.wait + self.walk + self.transfer + self.crowding + self.denied + self.unfinished
    }

    fn add(&mut self, o: &Ledger) {
        self.in_vehicle += o.in_vehicle;
        self.wait += o.wait;
        self.walk += o.walk;
        self.transfer += o.transfer;
        self.crowding += o.crowding;
        self.denied += o.denied;
        self.unfinished += o.unfinished;
    }
}

/// What happened to one passenger on one day.
#[derive(Clone, Debug, PartialEq)]
pub struct Journey {
    pub passenger: u32,
    /// Ridden segments as (boarding departure, alighting arrival).
    pub segments: Vec<(EventId, EventId)>,
    /// Departures at which boarding was denied.
    pub denied: Vec<EventId>,
    pub finished: bool,
    /// Arrival at the destination, if reached.
    pub arrival: Option<Time>,
    /// Where the day ended.
    pub end_stop: StopId,
    pub ledger: Ledger,
    /// Seconds spent standing in a vehicle.
    pub standing: f64,
    pub evaluated: bool,
}

impl Journey {
    pub fn new(passenger: u32, at: StopId, evaluated: bool) -> Self {
        Journey {
            passenger,
            segments: Vec::new(),
            denied: Vec::new(),
            finished: false,
            arrival: None,
            end_stop: at,
            ledger: Ledger::default(),
            standing: 0.0,
            evaluated,
        }
    }
}

/// Means over the evaluated passengers of one day.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DayReport {
    pub day: u32,
    pub passengers: usize,
    pub unfinished_count: usize,
    pub total: f64,
    pub components: Ledger,
    pub denied_per_pax: f64,
    pub standing: f64,
    pub realtime: RealtimeCounters,
    /// Events whose realised time differs from the schedule.
    pub delayed_events: usize,
    pub max_delay: Time,
}

impl DayReport {
    pub fn from_journeys(day: u32, journeys: &[Journey]) -> Self {
        let eval: Vec<&Journey> = journeys.iter().filter(|j| j.evaluated).collect();
        let n = eval.len();
        let mut sum = Ledger::default();
        let mut total = 0.0;
        let mut denied = 0usize;
        let mut standing = 0.0;
        for j in &eval {
            sum.add(&j.ledger);
            total += j.ledger.total();
            denied += j.denied.len();
            standing += j.standing;
        }
        let m = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        let components = Ledger {
            in_vehicle: sum.in_vehicle * m,
            wait: sum.wait * m,
            walk: sum.walk * m,
            transfer: sum.transfer * m,
            crowding: sum.crowding * m,
            denied: sum.denied * m,
            unfinished: sum.unfinished * m,
        };
        DayReport {
            day,
            passengers: n,
            unfinished_count: eval.iter().filter(|j| !j.finished).count(),
            total: total * m,
            components,
            denied_per_pax: denied as f64 * m,
            standing: standing * m,
            ..Default::default()
        }
    }

    pub const HEADER: [&'static str; 19] = [
        "day",
        "passengers",
        "unfinished",
        "total",
        "in_vehicle",
        "wait",
        "walk",
        "transfer",
        "crowding",
        "denied_surcharge",
        "unfinished_penalty",
        "denied_per_pax",
        "standing_time",
        "rt_triggered",
        "rt_changed",
        "seat_redecisions",
        "seat_changes",
        "delayed_events",
        "max_delay",
    ];

    pub fn row(&self) -> Vec<String> {
        let c = &self.components;
        let f = |x: f64| format!("{x:.6}");
        vec![
            self.day.to_string(),
            self.passengers.to_string(),
            self.unfinished_count.to_string(),
            f(self.total),
            f(c.in_vehicle),
            f(c.wait),
            f(c.walk),
            f(c.transfer),
            f(c.crowding),
            f(c.denied),
            f(c.unfinished),
            f(self.denied_per_pax),
            f(self.standing),
            self.realtime.triggered().to_string(),
            self.realtime.changed().to_string(),
            self.realtime.seat_redecisions.0.to_string(),
            self.realtime.seat_redecisions.1.to_string(),
            self.delayed_events.to_string(),
            self.max_delay.to_string(),
        ]
    }
}
