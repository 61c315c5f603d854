//! Event-activity network: stops, trips grouped into lines, footpaths and
//! dependency arcs, plus the transfer rules shared by routing and simulation.

use std::fmt;

use rustc_hash::FxHashMap;

/// Integer seconds since midnight.
pub type Time = i64;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(StopId);
id_type!(EventId);
id_type!(TripId);
id_type!(LineId);

/// Arrivals sort before departures at equal times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Arrival,
    Departure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stop {
    pub code: String,
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub mct: Time,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub trip: TripId,
    pub stop: StopId,
    pub seq: u32,
    pub tau_reg: Time,
    /// Minimum duration of the activity leaving this event (0 for a trip's last arrival).
    pub min_next: Time,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trip {
    pub code: String,
    pub line: LineId,
    pub first_event: EventId,
    pub n_stops: u32,
    pub cap_sit: u32,
    pub cap: u32,
    pub door_capacity: f64,
    /// Dependency arcs leaving this trip: (successor, minimum turnaround).
    pub successors: Vec<(TripId, Time)>,
}

impl Trip {
    /// Departure at stop position `seq` (0-based, `seq < n_stops - 1`).
    #[inline]
    pub fn dep(&self, seq: u32) -> EventId {
        debug_assert!(seq + 1 < self.n_stops);
        EventId(self.first_event.0 + 2 * seq)
    }

    /// Arrival at stop position `seq` (`seq >= 1`).
    #[inline]
    pub fn arr(&self, seq: u32) -> EventId {
        debug_assert!(seq >= 1 && seq < self.n_stops);
        EventId(self.first_event.0 + 2 * seq - 1)
    }

    pub fn last_event(&self) -> EventId {
        self.arr(self.n_stops - 1)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        let first = self.first_event.0;
        (first..first + 2 * (self.n_stops - 1)).map(EventId)
    }

    pub fn is_unlimited(&self) -> bool {
        self.cap == u32::MAX
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub code: String,
    /// Ordered by first departure.
    pub trips: Vec<TripId>,
    pub stops: Vec<StopId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityKind {
    Driving,
    Dwelling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Activity {
    pub kind: ActivityKind,
    pub from: EventId,
    pub to: EventId,
    pub ivt_reg: Time,
    pub ivt_min: Time,
}

/// Which event times a query should read.
#[derive(Clone, Copy, Debug)]
pub enum TimeView<'a> {
    Scheduled,
    Current(&'a [Time]),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkError {
    /// Input table the problem was found in.
    pub table: &'static str,
    /// Zero-based row within that table, if the problem is tied to one row.
    pub row: Option<usize>,
    pub message: String,
}

impl NetworkError {
    fn new(table: &'static str, row: Option<usize>, message: impl Into<String>) -> Self {
        NetworkError { table, row, message: message.into() }
    }
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "{} row {}: {}", self.table, r, self.message),
            None => write!(f, "{}: {}", self.table, self.message),
        }
    }
}

impl std::error::Error for NetworkError {}

#[derive(Clone, Debug, PartialEq)]
pub struct StopRow {
    pub id: String,
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub mct: Time,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FootpathRow {
    pub from: String,
    pub to: String,
    pub length: Time,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripRow {
    pub trip: String,
    pub line: String,
    pub cap_sit: u32,
    pub cap: u32,
    pub door_capacity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StopTimeRow {
    pub trip: String,
    pub seq: u32,
    pub stop: String,
    pub arr: Time,
    pub dep: Time,
    /// Minimum driving time from the previous stop (ignored on the first row).
    pub min_drive: Time,
    /// Minimum dwell at this stop (ignored on first and last rows).
    pub min_dwell: Time,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DependencyRow {
    pub from_trip: String,
    pub to_trip: String,
    pub min_turnaround: Time,
}

/// Raw timetable tables, keyed by codes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NetworkInput {
    pub stops: Vec<StopRow>,
    pub footpaths: Vec<FootpathRow>,
    pub trips: Vec<TripRow>,
    pub stop_times: Vec<StopTimeRow>,
    pub dependencies: Vec<DependencyRow>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_footpath: Time,
    pub default_headway: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_footpath: 1800, default_headway: 3600.0 }
    }
}

#[derive(Clone, Debug)]
pub struct Network {
    pub stops: Vec<Stop>,
    pub events: Vec<Event>,
    pub trips: Vec<Trip>,
    pub lines: Vec<Line>,
    footpaths_out: Vec<Vec<(StopId, Time)>>,
    footpaths_in: Vec<Vec<(StopId, Time)>>,
    deps_at: Vec<Vec<EventId>>,
    arcs_by_time: Vec<EventId>,
    headway: Vec<f64>,
    stop_index: FxHashMap<String, StopId>,
    trip_index: FxHashMap<String, TripId>,
}

impl Network {
    pub fn build(input: &NetworkInput, opts: &BuildOptions) -> Result<Network, Vec<NetworkError>> {
        let mut errs = Vec::new();

        let mut stops = Vec::with_capacity(input.stops.len());
        let mut stop_index = FxHashMap::default();
        for (r, s) in input.stops.iter().enumerate() {
            if s.mct < 0 {
                errs.push(NetworkError::new("stops", Some(r), format!("stop {}: negative mct", s.id)));
            }
            if stop_index.contains_key(&s.id) {
                errs.push(NetworkError::new("stops", Some(r), format!("duplicate stop id {}", s.id)));
                continue;
            }
            stop_index.insert(s.id.clone(), StopId(stops.len() as u32));
            stops.push(Stop { code: s.id.clone(), name: s.name.clone(), x: s.x, y: s.y, mct: s.mct.max(0) });
        }

        let mut fp: FxHashMap<(StopId, StopId), Time> = FxHashMap::default();
        for (r, f) in input.footpaths.iter().enumerate() {
            let (a, b) = match (stop_index.get(&f.from), stop_index.get(&f.to)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => {
                    errs.push(NetworkError::new(
                        "footpaths",
                        Some(r),
                        format!("unknown stop in footpath {} -> {}", f.from, f.to),
                    ));
                    continue;
                }
            };
            if f.length < 0 {
                errs.push(NetworkError::new("footpaths", Some(r), "negative footpath length"));
                continue;
            }
            if a == b || f.length > opts.max_footpath {
                continue;
            }
            for key in [(a, b), (b, a)] {
                let e = fp.entry(key).or_insert(f.length);
                *e = (*e).min(f.length);
            }
        }
        let mut footpaths_out = vec![Vec::new(); stops.len()];
        let mut footpaths_in = vec![Vec::new(); stops.len()];
        for (&(a, b), &len) in &fp {
            footpaths_out[a.idx()].push((b, len));
            footpaths_in[b.idx()].push((a, len));
        }
        for v in footpaths_out.iter_mut().chain(footpaths_in.iter_mut()) {
            v.sort_unstable();
        }

        // Trips and their stop-time rows.
        let mut trip_index = FxHashMap::default();
        let mut trip_rows: Vec<(usize, &TripRow)> = Vec::new();
        for (r, t) in input.trips.iter().enumerate() {
            if trip_index.contains_key(&t.trip) {
                errs.push(NetworkError::new("trips", Some(r), format!("duplicate trip id {}", t.trip)));
                continue;
            }
            if t.cap_sit < 1 || t.cap < t.cap_sit {
                errs.push(NetworkError::new(
                    "trips",
                    Some(r),
                    format!("trip {}: need cap >= cap_sit >= 1 (cap {}, cap_sit {})", t.trip, t.cap, t.cap_sit),
                ));
            }
            if !(t.door_capacity > 0.0) || !t.door_capacity.is_finite() {
                errs.push(NetworkError::new("trips", Some(r), format!("trip {}: door_capacity must be > 0", t.trip)));
            }
            trip_index.insert(t.trip.clone(), TripId(trip_rows.len() as u32));
            trip_rows.push((r, t));
        }
        let mut times_by_trip: Vec<Vec<(usize, &StopTimeRow)>> = vec![Vec::new(); trip_rows.len()];
        for (r, st) in input.stop_times.iter().enumerate() {
            match trip_index.get(&st.trip) {
                Some(&t) => times_by_trip[t.idx()].push((r, st)),
                None => errs.push(NetworkError::new("stop_times", Some(r), format!("unknown trip {}", st.trip))),
            }
        }

        let mut line_index: FxHashMap<String, LineId> = FxHashMap::default();
        let mut lines: Vec<Line> = Vec::new();
        let mut trips = Vec::with_capacity(trip_rows.len());
        let mut events = Vec::new();
        for (ti, (r, t)) in trip_rows.iter().enumerate() {
            let rows = &mut times_by_trip[ti];
            rows.sort_by_key(|(_, st)| st.seq);
            let mut ok = true;
            if rows.len() < 2 {
                errs.push(NetworkError::new("trips", Some(*r), format!("trip {} has fewer than two stops", t.trip)));
                ok = false;
            }
            for w in rows.windows(2) {
                if w[0].1.seq == w[1].1.seq {
                    errs.push(NetworkError::new(
                        "stop_times",
                        Some(w[1].0),
                        format!("duplicate seq {} in trip {}", w[1].1.seq, t.trip),
                    ));
                    ok = false;
                }
            }
            let mut stop_ids = Vec::with_capacity(rows.len());
            for (row, st) in rows.iter() {
                match stop_index.get(&st.stop) {
                    Some(&s) => stop_ids.push(s),
                    None => {
                        errs.push(NetworkError::new("stop_times", Some(*row), format!("unknown stop {}", st.stop)));
                        ok = false;
                    }
                }
            }
            let n = rows.len();
            for (i, (row, st)) in rows.iter().enumerate() {
                if st.min_drive < 0 || st.min_dwell < 0 {
                    errs.push(NetworkError::new("stop_times", Some(*row), "negative minimum time"));
                    ok = false;
                }
                if i > 0 {
                    let prev = rows[i - 1].1;
                    if st.arr - prev.dep < 1 {
                        errs.push(NetworkError::new(
                            "stop_times",
                            Some(*row),
                            format!("trip {}: driving time into seq {} must be at least 1 s", t.trip, st.seq),
                        ));
                        ok = false;
                    } else if st.min_drive > st.arr - prev.dep {
                        errs.push(NetworkError::new(
                            "stop_times",
                            Some(*row),
                            format!("trip {}: min_drive exceeds scheduled driving time", t.trip),
                        ));
                        ok = false;
                    }
                }
                if i > 0 && i + 1 < n {
                    if st.dep < st.arr {
                        errs.push(NetworkError::new(
                            "stop_times",
                            Some(*row),
                            format!("trip {}: departure before arrival", t.trip),
                        ));
                        ok = false;
                    } else if st.min_dwell > st.dep - st.arr {
                        errs.push(NetworkError::new(
                            "stop_times",
                            Some(*row),
                            format!("trip {}: min_dwell exceeds scheduled dwell", t.trip),
                        ));
                        ok = false;
                    }
                }
                if st.dep < 0 || st.arr < 0 {
                    errs.push(NetworkError::new("stop_times", Some(*row), "negative time"));
                    ok = false;
                }
            }
            let line = *line_index.entry(t.line.clone()).or_insert_with(|| {
                lines.push(Line { code: t.line.clone(), trips: Vec::new(), stops: Vec::new() });
                LineId(lines.len() as u32 - 1)
            });
            let first_event = EventId(events.len() as u32);
            if ok {
                for i in 0..n {
                    let st = rows[i].1;
                    if i > 0 {
                        let min_next = if i + 1 < n { st.min_dwell } else { 0 };
                        events.push(Event {
                            kind: EventKind::Arrival,
                            trip: TripId(ti as u32),
                            stop: stop_ids[i],
                            seq: i as u32,
                            tau_reg: st.arr,
                            min_next,
                        });
                    }
                    if i + 1 < n {
                        events.push(Event {
                            kind: EventKind::Departure,
                            trip: TripId(ti as u32),
                            stop: stop_ids[i],
                            seq: i as u32,
                            tau_reg: st.dep,
                            min_next: rows[i + 1].1.min_drive,
                        });
                    }
                }
                lines[line.idx()].trips.push(TripId(ti as u32));
            }
            trips.push(Trip {
                code: t.trip.clone(),
                line,
                first_event,
                n_stops: if ok { n as u32 } else { 0 },
                cap_sit: t.cap_sit,
                cap: t.cap,
                door_capacity: t.door_capacity,
                successors: Vec::new(),
            });
        }

        for (r, d) in input.dependencies.iter().enumerate() {
            match (trip_index.get(&d.from_trip), trip_index.get(&d.to_trip)) {
                (Some(&a), Some(&b)) => {
                    if d.min_turnaround < 0 {
                        errs.push(NetworkError::new("dependencies", Some(r), "negative min_turnaround"));
                    } else if a == b {
                        errs.push(NetworkError::new("dependencies", Some(r), "dependency arc from a trip to itself"));
                    } else {
                        trips[a.idx()].successors.push((b, d.min_turnaround));
                    }
                }
                _ => errs.push(NetworkError::new(
                    "dependencies",
                    Some(r),
                    format!("unknown trip in dependency {} -> {}", d.from_trip, d.to_trip),
                )),
            }
        }

        if !errs.is_empty() {
            return Err(errs);
        }

        // Lines: identical stop sequence, no overtaking.
        let stop_seq = |t: &Trip| -> Vec<StopId> {
            (0..t.n_stops)
                .map(|i| if i == 0 { events[t.dep(0).idx()].stop } else { events[t.arr(i).idx()].stop })
                .collect()
        };
        for line in lines.iter_mut() {
            line.trips.sort_by_key(|&t| (events[trips[t.idx()].first_event.idx()].tau_reg, t));
            let Some(&first) = line.trips.first() else { continue };
            line.stops = stop_seq(&trips[first.idx()]);
            for w in line.trips.windows(2) {
                let (a, b) = (&trips[w[0].idx()], &trips[w[1].idx()]);
                if stop_seq(b) != line.stops {
                    errs.push(NetworkError::new(
                        "trips",
                        None,
                        format!("line {}: trip {} serves a different stop sequence", line.code, b.code),
                    ));
                    continue;
                }
                for (ea, eb) in a.events().zip(b.events()) {
                    if events[ea.idx()].tau_reg > events[eb.idx()].tau_reg {
                        errs.push(NetworkError::new(
                            "trips",
                            None,
                            format!("line {}: trip {} overtakes trip {}", line.code, b.code, a.code),
                        ));
                        break;
                    }
                }
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        let mut headway = vec![0.0; events.len()];
        for line in &lines {
            let ts = &line.trips;
            let n_ev = trips[ts[0].idx()].events().count();
            for off in 0..n_ev as u32 {
                let ev = |t: TripId| EventId(trips[t.idx()].first_event.0 + off);
                let gaps: Vec<f64> = ts
                    .windows(2)
                    .map(|w| (events[ev(w[1]).idx()].tau_reg - events[ev(w[0]).idx()].tau_reg) as f64)
                    .collect();
                for (i, &t) in ts.iter().enumerate() {
                    headway[ev(t).idx()] = if i < gaps.len() {
                        gaps[i]
                    } else if gaps.is_empty() {
                        opts.default_headway
                    } else {
                        gaps.iter().sum::<f64>() / gaps.len() as f64
                    };
                }
            }
        }

        let mut deps_at = vec![Vec::new(); stops.len()];
        for (i, e) in events.iter().enumerate() {
            if e.kind == EventKind::Departure {
                deps_at[e.stop.idx()].push(EventId(i as u32));
            }
        }
        for v in deps_at.iter_mut() {
            v.sort_by_key(|&e| (events[e.idx()].tau_reg, e));
        }

        let mut arcs_by_time: Vec<EventId> =
            (0..events.len() as u32).map(EventId).filter(|e| events[e.idx()].kind == EventKind::Departure).collect();
        arcs_by_time.sort_by_key(|&e| (events[e.idx()].tau_reg, events[e.idx() + 1].tau_reg, e));

        Ok(Network {
            stops,
            events,
            trips,
            lines,
            footpaths_out,
            footpaths_in,
            deps_at,
            arcs_by_time,
            headway,
            stop_index,
            trip_index,
        })
    }

    #[inline]
    pub fn event(&self, e: EventId) -> &Event {
        &self.events[e.idx()]
    }

    #[inline]
    pub fn trip(&self, t: TripId) -> &Trip {
        &self.trips[t.idx()]
    }

    #[inline]
    pub fn trip_of(&self, e: EventId) -> &Trip {
        &self.trips[self.events[e.idx()].trip.idx()]
    }

    #[inline]
    pub fn stop_of(&self, e: EventId) -> StopId {
        self.events[e.idx()].stop
    }

    #[inline]
    pub fn tau_reg(&self, e: EventId) -> Time {
        self.events[e.idx()].tau_reg
    }

    pub fn stop_id(&self, code: &str) -> Option<StopId> {
        self.stop_index.get(code).copied()
    }

    pub fn trip_id(&self, code: &str) -> Option<TripId> {
        self.trip_index.get(code).copied()
    }

    pub fn num_driving_arcs(&self) -> usize {
        self.events.iter().filter(|e| e.kind == EventKind::Departure).count()
    }

    pub fn num_footpaths(&self) -> usize {
        self.footpaths_out.iter().map(Vec::len).sum()
    }

    /// Directed footpaths leaving `s`, sorted by target.
    pub fn footpaths_from(&self, s: StopId) -> &[(StopId, Time)] {
        &self.footpaths_out[s.idx()]
    }

    /// Directed footpaths entering `s`, sorted by source.
    pub fn footpaths_to(&self, s: StopId) -> &[(StopId, Time)] {
        &self.footpaths_in[s.idx()]
    }

    pub fn footpath(&self, from: StopId, to: StopId) -> Option<Time> {
        let v = &self.footpaths_out[from.idx()];
        v.binary_search_by_key(&to, |&(s, _)| s).ok().map(|i| v[i].1)
    }

    /// Departures at `s` sorted by scheduled time.
    pub fn departures_at(&self, s: StopId) -> &[EventId] {
        &self.deps_at[s.idx()]
    }

    /// Driving arcs (keyed by departure) ascending by scheduled departure, then arrival.
    pub fn arcs_by_time(&self) -> &[EventId] {
        &self.arcs_by_time
    }

    /// Minimum time needed between an arrival at `from` and a departure at `to`.
    pub fn min_transfer(&self, from: StopId, to: StopId) -> Option<Time> {
        if from == to {
            Some(self.stops[from.idx()].mct)
        } else {
            self.footpath(from, to)
        }
    }

    /// Activity leaving `e` within its trip, if any.
    pub fn activity_from(&self, e: EventId) -> Option<Activity> {
        let ev = self.event(e);
        let trip = self.trip(ev.trip);
        if e == trip.last_event() {
            return None;
        }
        let to = EventId(e.0 + 1);
        Some(Activity {
            kind: match ev.kind {
                EventKind::Departure => ActivityKind::Driving,
                EventKind::Arrival => ActivityKind::Dwelling,
            },
            from: e,
            to,
            ivt_reg: self.tau_reg(to) - ev.tau_reg,
            ivt_min: ev.min_next,
        })
    }

    /// Scheduled time until the corresponding event of the line's next trip.
    #[inline]
    pub fn headway(&self, e: EventId) -> f64 {
        self.headway[e.idx()]
    }

    fn time(&self, e: EventId, view: TimeView<'_>) -> Time {
        match view {
            TimeView::Scheduled => self.tau_reg(e),
            TimeView::Current(t) => t[e.idx()],
        }
    }

    fn check_transfer_pair(&self, arr: EventId, dep: EventId) -> Result<(), NetworkError> {
        let n = self.events.len();
        if arr.idx() >= n || dep.idx() >= n {
            return Err(NetworkError::new("events", None, format!("unknown event in transfer {arr} -> {dep}")));
        }
        let (a, d) = (self.event(arr), self.event(dep));
        if a.kind != EventKind::Arrival || d.kind != EventKind::Departure {
            return Err(NetworkError::new(
                "events",
                None,
                format!("transfer {arr} -> {dep} must go arrival -> departure"),
            ));
        }
        if a.trip == d.trip {
            return Err(NetworkError::new("events", None, format!("transfer {arr} -> {dep} stays on the same trip")));
        }
        Ok(())
    }

    /// Same stop with mct, or a footpath; never both.
    pub fn transfer_valid(&self, arr: EventId, dep: EventId, view: TimeView<'_>) -> Result<bool, NetworkError> {
        self.check_transfer_pair(arr, dep)?;
        Ok(match self.min_transfer(self.stop_of(arr), self.stop_of(dep)) {
            Some(m) => self.time(arr, view) + m <= self.time(dep, view),
            None => false,
        })
    }

    /// (walk, wait) of a valid transfer.
    pub fn transfer_times(&self, arr: EventId, dep: EventId, view: TimeView<'_>) -> Result<(Time, Time), NetworkError> {
        if !self.transfer_valid(arr, dep, view)? {
            return Err(NetworkError::new("events", None, format!("transfer {arr} -> {dep} is not valid")));
        }
        let (sa, sd) = (self.stop_of(arr), self.stop_of(dep));
        let walk = if sa == sd { 0 } else { self.footpath(sa, sd).unwrap_or(0) };
        Ok((walk, self.time(dep, view) - self.time(arr, view) - walk))
    }

    pub fn distance(&self, a: StopId, b: StopId) -> f64 {
        let (p, q) = (&self.stops[a.idx()], &self.stops[b.idx()]);
        ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt()
    }

    pub fn scheduled_times(&self) -> Vec<Time> {
        self.events.iter().map(|e| e.tau_reg).collect()
    }
}
