//! Synthetic city-scale bus networks for benchmarks: a stop grid, corridors
//! served in both directions with turnarounds, walking links between nearby
//! stops and a random OD matrix.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::io::{OdRow, RawBundle};
use crate::network::{DependencyRow, FootpathRow, NetworkInput, StopRow, StopTimeRow, Time, TripRow};
use crate::rng::{stream, Tag};

#[derive(Clone, Debug)]
pub struct SyntheticParams {
    pub grid: usize,
    /// Metres between neighbouring grid stops.
    pub spacing: f64,
    /// Corridors; each is served by one line per direction.
    pub corridors: usize,
    pub stops_per_line: (usize, usize),
    /// Headways in seconds a corridor picks from.
    pub headways: Vec<Time>,
    /// Trips depart in `[start − lead, end)`.
    pub start: Time,
    pub end: Time,
    pub lead: Time,
    pub cap_sit: u32,
    pub cap: u32,
    pub door_capacity: f64,
    pub od_pairs: usize,
    pub pax_per_hour: f64,
    pub walk_speed: f64,
    pub max_walk: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    /// About 250 stops, 22 lines, 200 trips, 2300 driving arcs and 2000
    /// passengers per hour over two hours.
    fn default() -> Self {
        SyntheticParams {
            grid: 16,
            spacing: 400.0,
            corridors: 11,
            stops_per_line: (10, 15),
            headways: vec![600, 900, 1200, 1200],
            start: 25200,
            end: 32400,
            lead: 1800,
            cap_sit: 30,
            cap: 70,
            door_capacity: 0.4,
            od_pairs: 800,
            pax_per_hour: 1950.0,
            walk_speed: 1.2,
            max_walk: 450.0,
            seed: 7,
        }
    }
}

/// A straight run of `len` grid stops along a row (even corridors) or a
/// column (odd corridors), with one sideways jog so lines are not all parallel.
fn corridor_path<R: Rng>(c: usize, grid: usize, len: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let len = len.min(grid);
    let lane = rng.gen_range(1..grid - 1);
    let from = rng.gen_range(0..=grid - len);
    let jog = rng.gen_range(1..len - 1);
    let shift: i64 = if rng.gen() { 1 } else { -1 };
    (0..len)
        .map(|i| {
            let side = if i >= jog { (lane as i64 + shift) as usize } else { lane };
            let along = from + i;
            if c.is_multiple_of(2) {
                (along, side)
            } else {
                (side, along)
            }
        })
        .collect()
}

/// Builds the network and demand tables.
pub fn generate(p: &SyntheticParams) -> RawBundle {
    let mut rng = stream(p.seed, Tag::Synthetic, &[]);
    let code = |x: usize, y: usize| format!("S{x:02}_{y:02}");
    let mut input = NetworkInput::default();
    for x in 0..p.grid {
        for y in 0..p.grid {
            input.stops.push(StopRow {
                id: code(x, y),
                name: code(x, y),
                x: x as f64 * p.spacing,
                y: y as f64 * p.spacing,
                mct: 60,
            });
        }
    }
    for a in &input.stops {
        for b in &input.stops {
            let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
            if a.id != b.id && d <= p.max_walk {
                input.footpaths.push(FootpathRow {
                    from: a.id.clone(),
                    to: b.id.clone(),
                    length: (d / p.walk_speed).round() as Time,
                });
            }
        }
    }

    let mut served = Vec::new();
    for c in 0..p.corridors {
        let len = rng.gen_range(p.stops_per_line.0..=p.stops_per_line.1);
        let path = corridor_path(c, p.grid, len, &mut rng);
        served.extend(path.iter().copied());
        let drives: Vec<Time> = (1..len).map(|_| rng.gen_range(55..=95)).collect();
        let headway = *p.headways.choose(&mut rng).unwrap();
        let offset = rng.gen_range(0..headway);
        let run_time: Time = drives.iter().sum::<Time>() + 25 * (len as Time - 2);
        let mut last_arrival: Vec<(String, Time)> = Vec::new();
        for dir in 0..2 {
            let line = format!("L{c:02}{}", if dir == 0 { 'a' } else { 'b' });
            let stops: Vec<(usize, usize)> = if dir == 0 { path.clone() } else { path.iter().rev().copied().collect() };
            let drives: Vec<Time> = if dir == 0 { drives.clone() } else { drives.iter().rev().copied().collect() };
            let mut t0 = p.start - p.lead + offset + if dir == 1 { run_time / 2 } else { 0 };
            let mut k = 0;
            while t0 < p.end {
                let trip = format!("{line}_{k:02}");
                input.trips.push(TripRow {
                    trip: trip.clone(),
                    line: line.clone(),
                    cap_sit: p.cap_sit,
                    cap: p.cap,
                    door_capacity: p.door_capacity,
                });
                let mut t = t0;
                for (i, &(x, y)) in stops.iter().enumerate() {
                    let (arr, min_drive) = if i == 0 { (t, 0) } else { (t + drives[i - 1], drives[i - 1] * 9 / 10) };
                    let dwell = if i == 0 || i == len - 1 { 0 } else { 25 };
                    input.stop_times.push(StopTimeRow {
                        trip: trip.clone(),
                        seq: i as u32,
                        stop: code(x, y),
                        arr,
                        dep: arr + dwell,
                        min_drive,
                        min_dwell: if dwell > 0 { 15 } else { 0 },
                    });
                    t = arr + dwell;
                }
                if dir == 1 {
                    // Vehicles turn around: the earliest inbound trip that
                    // starts after this outbound arrival continues the block.
                    if let Some(i) = last_arrival.iter().position(|&(_, arr)| arr + 120 <= t0) {
                        let (from, _) = last_arrival.remove(i);
                        input.dependencies.push(DependencyRow {
                            from_trip: from,
                            to_trip: trip.clone(),
                            min_turnaround: 120,
                        });
                    }
                } else {
                    last_arrival.push((trip.clone(), t));
                }
                t0 += headway;
                k += 1;
            }
        }
    }
    served.sort_unstable();
    served.dedup();

    let mut od = Vec::new();
    let mut weights = Vec::new();
    while od.len() < p.od_pairs {
        let a = served[rng.gen_range(0..served.len())];
        let b = served[rng.gen_range(0..served.len())];
        let d = (a.0.abs_diff(b.0) + a.1.abs_diff(b.1)) as f64 * p.spacing;
        if d < 1200.0 {
            continue;
        }
        od.push((code(a.0, a.1), code(b.0, b.1)));
        weights.push(rng.gen_range(0.2..1.0));
    }
    let total: f64 = weights.iter().sum();
    let od = od
        .into_iter()
        .zip(weights)
        .map(|((origin, dest), w)| OdRow { origin, dest, per_hour: p.pax_per_hour * w / total, class: 0 })
        .collect();
    RawBundle::new(input, od)
}
