#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use ptassign::network::{BuildOptions, FootpathRow, Network, NetworkInput, StopRow, StopTimeRow, Time, TripRow};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub stops: usize,
    pub lines: usize,
    pub trips: usize,
    pub footpaths: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { stops: 10, lines: 3, trips: 20, footpaths: 6 }
    }
}

/// A random network within `shape`: lines over distinct stops, trips of a line
/// sharing one running profile so they never overtake, symmetric footpaths.
pub fn random_input<R: Rng>(rng: &mut R, shape: Shape) -> NetworkInput {
    let n = rng.gen_range(4..=shape.stops.max(4));
    let mut input = NetworkInput::default();
    for i in 0..n {
        input.stops.push(StopRow {
            id: format!("S{i}"),
            name: format!("Stop {i}"),
            x: rng.gen_range(0.0..2000.0),
            y: rng.gen_range(0.0..2000.0),
            mct: rng.gen_range(0..=120),
        });
    }
    let n_fp = rng.gen_range(0..=shape.footpaths);
    let mut pairs = Vec::new();
    for _ in 0..n_fp {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || pairs.contains(&(a.min(b), a.max(b))) {
            continue;
        }
        pairs.push((a.min(b), a.max(b)));
        let length = rng.gen_range(30..=600);
        for (f, t) in [(a, b), (b, a)] {
            input.footpaths.push(FootpathRow { from: format!("S{f}"), to: format!("S{t}"), length });
        }
    }

    let lines = rng.gen_range(1..=shape.lines);
    let mut budget = shape.trips;
    for l in 0..lines {
        let len = rng.gen_range(2..=n.min(5));
        let ids: Vec<usize> = (0..n).collect();
        let stops: Vec<usize> = ids.choose_multiple(rng, len).copied().collect();
        let drives: Vec<Time> = (1..len).map(|_| rng.gen_range(60..=600)).collect();
        let dwells: Vec<Time> =
            (0..len).map(|i| if i == 0 || i == len - 1 { 0 } else { rng.gen_range(0..=60) }).collect();
        let left = lines - l - 1;
        let count = rng.gen_range(1..=(budget - left).clamp(1, shape.trips / lines + 2));
        budget -= count;
        let mut starts: Vec<Time> = (0..count).map(|_| rng.gen_range(0..5400)).collect();
        starts.sort_unstable();
        starts.dedup();
        let cap_sit = rng.gen_range(1..=8);
        let cap = cap_sit + rng.gen_range(0..=8);
        let door = rng.gen_range(0.5..2.0);
        for (k, &t0) in starts.iter().enumerate() {
            let trip = format!("L{l}_{k}");
            input.trips.push(TripRow { trip: trip.clone(), line: format!("L{l}"), cap_sit, cap, door_capacity: door });
            let mut t = t0;
            for (i, &s) in stops.iter().enumerate() {
                let arr = if i == 0 { t } else { t + drives[i - 1] };
                input.stop_times.push(StopTimeRow {
                    trip: trip.clone(),
                    seq: i as u32,
                    stop: format!("S{s}"),
                    arr,
                    dep: arr + dwells[i],
                    min_drive: if i == 0 { 0 } else { drives[i - 1] * 4 / 5 },
                    min_dwell: dwells[i] / 2,
                });
                t = arr + dwells[i];
            }
        }
    }
    input
}

pub fn build(input: &NetworkInput) -> Network {
    Network::build(input, &BuildOptions::default()).expect("generated network is valid")
}
