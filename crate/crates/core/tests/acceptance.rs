//! Acceptance criteria, one line per criterion, exit code 1 if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::time::Instant;

use ptassign::choice::{reduce_choice_set, softmax_select, ChoiceParams};
use ptassign::congestion::dwell_delay;
use ptassign::demand::{generate, OdEntry, Passenger, PreferenceSet};
use ptassign::experiments::{capacity_experiment, simulate, unlimited_experiment};
use ptassign::io::{load_bundle, read_config, write_diff_loads, NetworkBundle};
use ptassign::learning::{
    blend, sample_weights, DayRecord, ExpectedView, Experience, ExperienceStore, LearningParams, WeightTable,
};
use ptassign::network::{BuildOptions, EventId, EventKind, Network, StopId, Time, TripId};
use ptassign::ptt::{compute_initial_profile, Ctx, Profile, ProfileQuery};
use ptassign::sim::{run_simulation, DayReport, DayResult, SimConfig};
use ptassign::synthetic::{self, SyntheticParams};
use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::FxHashSet;

use common::oracle::{self, Oracle};
use common::{fixture, rng, Shape};

type Outcome = Result<String, String>;
type Criterion<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn load_fixture(name: &str) -> (NetworkBundle, SimConfig) {
    let dir = fixture(name);
    let cfg = read_config(&dir.join("config.txt")).expect("fixture config");
    let bundle = load_bundle(&dir, &ptassign::experiments::build_options(&cfg)).expect("fixture bundle");
    (bundle, cfg)
}

fn feasible(net: &Network, days: &[DayResult]) -> Result<(), String> {
    for r in days {
        if r.capacity_violations > 0 {
            return Err(format!("day {}: {} violations", r.report.day, r.capacity_violations));
        }
        for &d in net.arcs_by_time() {
            let cap = net.trip_of(d).cap;
            if r.onboard[d.idx()] > cap {
                return Err(format!("day {}: {} on board of cap {cap}", r.report.day, r.onboard[d.idx()]));
            }
        }
    }
    Ok(())
}

/// Random OD demand over a random network, heavy enough to congest.
fn random_demand<R: Rng>(rng: &mut R, net: &Network, entries: usize, rate: f64) -> Vec<OdEntry> {
    let n = net.stops.len();
    (0..entries)
        .filter_map(|_| {
            let (o, d) = (rng.gen_range(0..n), rng.gen_range(0..n));
            (o != d).then(|| OdEntry {
                origin: StopId(o as u32),
                dest: StopId(d as u32),
                rate: rng.gen_range(0.0..rate),
                class: 0,
            })
        })
        .collect()
}

fn small_config(days: u32, seed: u64) -> SimConfig {
    SimConfig { frame_start: 0, frame_end: 7200, eval_end: 3600, days, seed, ..SimConfig::default() }
}

fn capacity_feasibility(congested: &[(Vec<DayResult>, u64)], synth: &(Network, Vec<DayResult>, f64)) -> Outcome {
    let mut runs = 0;
    let (cb, _) = load_fixture("congested");
    for (days, seed) in congested {
        feasible(&cb.network, days).map_err(|e| format!("congested seed {seed}: {e}"))?;
        runs += 1;
    }
    for name in ["null", "minimal"] {
        let (b, cfg) = load_fixture(name);
        let cfg = SimConfig { days: 30, ..cfg };
        let days = simulate(&b, &b.network, &cfg).map_err(|e| e.to_string())?;
        feasible(&b.network, &days).map_err(|e| format!("{name}: {e}"))?;
        runs += 1;
    }
    feasible(&synth.0, &synth.1).map_err(|e| format!("synthetic: {e}"))?;
    runs += 1;
    let mut r = rng(11);
    let mut denials = 0;
    for i in 0..10 {
        let net = common::build(&common::random_input(&mut r, Shape::default()));
        let od = random_demand(&mut r, &net, 12, 120.0);
        let pax = generate(&net, &od, 0, 7200, i).map_err(|e| e.to_string())?;
        let days = run_simulation(&net, &small_config(30, i), pax).map_err(|e| e.to_string())?;
        feasible(&net, &days).map_err(|e| format!("random network {i}: {e}"))?;
        denials += days.iter().map(|d| d.denied.iter().sum::<u32>()).sum::<u32>();
        runs += 1;
    }
    Ok(format!("{runs} runs of 30 days, 0 violations ({denials} denials on random networks)"))
}

fn profile_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let prefs = PreferenceSet::default();
    let (mut networks, mut queries, mut events, mut filtered, mut transfers) = (0, 0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut attempts = 0;
    while networks < 40 {
        attempts += 1;
        if attempts > 500 {
            return Err(format!("only {networks} networks with routable queries"));
        }
        let net = common::build(&common::random_input(&mut r, Shape::default()));
        let mut used = false;
        for _ in 0..12 {
            let n = net.stops.len();
            let (o, d) = (StopId(r.gen_range(0..n) as u32), StopId(r.gen_range(0..n) as u32));
            if o == d {
                continue;
            }
            let lambda = *[0.5, 0.9, 1.3].choose(&mut r).unwrap();
            let q = ProfileQuery {
                origin: o,
                tau_start: r.gen_range(0..4000),
                lambda_std: lambda,
                delta_tau: *[600, 1800, 3600].choose(&mut r).unwrap(),
                frame_end: r.gen_range(3000..9000),
            };
            let ctx = Ctx { net: &net, prefs: &prefs, dest: d };
            let ip = compute_initial_profile(&ctx, &q);
            let ea = oracle::earliest_arrival(&net, o, d, q.tau_start);
            if ea != ip.earliest_arrival {
                return Err(format!("earliest arrival {:?} vs oracle {ea:?}", ip.earliest_arrival));
            }
            let Some(ea) = ea else { continue };
            let horizon = (ea + q.delta_tau).min(q.frame_end.max(ea));
            let arcs = oracle::reachable(&net, o, q.tau_start, horizon);
            let scanned: FxHashSet<EventId> = ip.arcs.iter().copied().collect();
            if scanned != arcs {
                return Err(format!("reachable arcs differ: {} scanned vs {} enumerated", scanned.len(), arcs.len()));
            }
            let mut orc = Oracle::open(&net, &prefs, d, lambda, arcs.clone());
            for e in 0..net.events.len() {
                let e = EventId(e as u32);
                let in_arc = match net.event(e).kind {
                    EventKind::Departure => arcs.contains(&e),
                    EventKind::Arrival => arcs.contains(&EventId(e.0 - 1)),
                };
                let expect = if !in_arc {
                    f64::INFINITY
                } else if net.event(e).kind == EventKind::Departure {
                    orc.f_dep(e)
                } else {
                    orc.f_arr(e)
                };
                let got = ip.f0[e.idx()];
                let diff = if expect.is_infinite() && got.is_infinite() { 0.0 } else { (expect - got).abs() };
                if !(diff <= 1e-6) {
                    return Err(format!("event {} scan {got} vs oracle {expect}", e.0));
                }
                worst = worst.max(diff);
                events += expect.is_finite() as usize;
            }
            transfers += orc.transfers;

            // The filtered profile against the oracle confined to its universe.
            let u = reduce_choice_set(&ctx, &ip, o, q.tau_start, lambda);
            let mut profile = Profile::new(u, ip.earliest_arrival);
            let store = ExperienceStore::default();
            let weights = WeightTable::new(8, 0.5);
            profile.full_recompute(
                &ctx,
                &ExpectedView { net: &net, store: &store, lambda_std: lambda, weights: &weights },
            );
            let mut within = Oracle::within(&net, &prefs, d, lambda, profile.universe());
            for (e, v) in profile.stored_values() {
                let expect = if net.event(e).kind == EventKind::Departure { within.f_dep(e) } else { within.f_arr(e) };
                if !((expect - v).abs() <= 1e-6) {
                    return Err(format!("filtered event {} profile {v} vs oracle {expect}", e.0));
                }
                worst = worst.max((expect - v).abs());
                filtered += 1;
            }
            queries += 1;
            used = true;
        }
        networks += used as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        secs < 10.0,
        format!(
            "{networks} networks, {queries} queries, {events} scanned values ({transfers} via transfers), {filtered} filtered values, max |diff| {worst:.1e}, {secs:.2} s"
        ),
    )
}

fn random_record<R: Rng>(rng: &mut R, net: &Network) -> DayRecord {
    let n = net.events.len();
    let mut times = net.scheduled_times();
    for t in &net.trips {
        let mut delay: Time = 0;
        for e in t.events() {
            if rng.gen_bool(0.3) {
                delay += rng.gen_range(0..120);
            }
            times[e.idx()] += delay;
        }
    }
    let loads = (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..2.5) }).collect();
    let p_denied = (0..n).map(|_| if rng.gen_bool(0.6) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
    DayRecord { loads, p_denied, times }
}

fn random_experience<R: Rng>(rng: &mut R, net: &Network) -> (Vec<(EventId, EventId)>, Vec<EventId>) {
    let mut segments = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let t = net.trip(TripId(rng.gen_range(0..net.trips.len()) as u32));
        let n = t.n_stops;
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        segments.push((t.dep(i), t.arr(j)));
    }
    let denied = (0..rng.gen_range(0..=2))
        .map(|_| {
            let t = net.trip(TripId(rng.gen_range(0..net.trips.len()) as u32));
            t.dep(rng.gen_range(0..t.n_stops - 1))
        })
        .collect();
    (segments, denied)
}

fn incremental_equivalence() -> Outcome {
    let mut r = rng(3);
    let prefs = PreferenceSet::default();
    let (mut trials, mut relaxed, mut arcs) = (0usize, 0usize, 0usize);
    while trials < 1000 {
        let net = common::build(&common::random_input(&mut r, Shape::default()));
        let n = net.stops.len();
        let (o, d) = (StopId(r.gen_range(0..n) as u32), StopId(r.gen_range(0..n) as u32));
        if o == d {
            continue;
        }
        let lambda = *[0.5, 1.3].choose(&mut r).unwrap();
        let kappa = *[0.5, 1.0].choose(&mut r).unwrap();
        let q = ProfileQuery {
            origin: o,
            tau_start: r.gen_range(0..3000),
            lambda_std: lambda,
            delta_tau: 3600,
            frame_end: 9000,
        };
        let ctx = Ctx { net: &net, prefs: &prefs, dest: d };
        let ip = compute_initial_profile(&ctx, &q);
        if ip.earliest_arrival.is_none() {
            continue;
        }
        let weights = WeightTable::new(16, kappa);
        let params = LearningParams { kappa, sample_window: 16 };
        let mut store = ExperienceStore::default();
        let mut profile = Profile::new(reduce_choice_set(&ctx, &ip, o, q.tau_start, lambda), ip.earliest_arrival);
        profile.full_recompute(&ctx, &ExpectedView { net: &net, store: &store, lambda_std: lambda, weights: &weights });
        for _ in 0..25 {
            let day = random_record(&mut r, &net);
            let (segments, denied) = random_experience(&mut r, &net);
            let changed = store.end_of_day(&net, Experience { segments: &segments, denied: &denied }, &day, &params);
            if changed.is_empty() {
                continue;
            }
            let view = ExpectedView { net: &net, store: &store, lambda_std: lambda, weights: &weights };
            relaxed += profile.update(&ctx, &view, &changed);
            arcs += profile.universe().len();
            let mut fresh = Profile::new(profile.universe().clone(), profile.earliest_arrival);
            fresh.full_recompute(&ctx, &view);
            if fresh.registers() != profile.registers() {
                return Err(format!("trial {trials}: registers differ from a full recompute"));
            }
            trials += 1;
        }
    }
    Ok(format!("{trials} trials bit-identical, {relaxed} of {arcs} arc relaxations"))
}

fn choice_frequencies() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut sets = 0;
    for k in 0..10 {
        let n = r.gen_range(2..=6);
        let mut costs: Vec<f64> = (0..n).map(|_| r.gen_range(100.0..1500.0_f64).round()).collect();
        if k % 3 == 0 {
            costs[1] = costs[0];
        }
        let gamma = r.gen_range(100.0..600.0);
        for epsilon in [0.0, 0.2, 1.0] {
            let params = ChoiceParams { gamma, epsilon };
            let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
            let ties = costs.iter().filter(|&&c| c == best).count() as f64;
            let z: f64 = costs.iter().map(|c| ((best - c) / gamma).exp()).sum();
            let expect: Vec<f64> = costs
                .iter()
                .map(|c| {
                    epsilon * ((best - c) / gamma).exp() / z + if *c == best { (1.0 - epsilon) / ties } else { 0.0 }
                })
                .collect();
            let draws = 100_000;
            let mut counts = vec![0usize; n];
            let mut rr = rng(1000 + k as u64);
            for _ in 0..draws {
                counts[softmax_select(&costs, &params, &mut rr)] += 1;
            }
            for i in 0..n {
                let dev = (counts[i] as f64 / draws as f64 - expect[i]).abs();
                worst = worst.max(dev);
                if dev > 0.01 {
                    return Err(format!("set {k} eps {epsilon}: option {i} off by {dev:.4}"));
                }
            }
            sets += 1;
        }
    }
    Ok(format!("{sets} (set, eps) cases of 1e5 draws, max deviation {worst:.4}"))
}

fn learning_identities() -> Outcome {
    let mut worst_sum: f64 = 0.0;
    for kappa in [0.25, 0.5, 1.0, 2.0] {
        for d in 1..=200 {
            let s: f64 = sample_weights(d, kappa).iter().sum();
            worst_sum = worst_sum.max((s - 1.0).abs());
        }
    }
    if worst_sum > 1e-12 {
        return Err(format!("weight sum off by {worst_sum:.2e}"));
    }
    let mut r = rng(5);
    let mut worst_mean: f64 = 0.0;
    for _ in 0..100 {
        let len = r.gen_range(1..=200);
        let xs: Vec<f64> = (0..len).map(|_| r.gen_range(0..=3000) as f64).collect();
        let mut v = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            v = blend(v, x, i as u32 + 1, 1.0);
        }
        let mean = xs.iter().sum::<f64>() / len as f64;
        worst_mean = worst_mean.max((v - mean).abs() / mean.abs().max(1.0));
    }
    ensure(
        worst_mean <= 1e-12,
        format!("max |sum w - 1| {worst_sum:.1e} over d<=200; kappa=1 blend vs mean rel. error {worst_mean:.1e} over 100 sequences"),
    )
}

fn dwell_model() -> Outcome {
    let example = dwell_delay(10, 10, 0.4, 30);
    if example != 20 {
        return Err(format!("dwell_delay(10, 10, 0.4, 30) = {example}"));
    }
    let mut r = rng(6);
    for i in 0..1000 {
        let (qa, qb) = (r.gen_range(0..60usize), r.gen_range(0..60usize));
        let milli = r.gen_range(100..3000i64);
        let dwell = r.gen_range(0..120);
        let moves = (qa + qb) as i64;
        let required = if moves == 0 { 0 } else { (moves * 1000 + milli - 1) / milli };
        let expect = if moves == 0 { 0 } else { (required - dwell).max(0) };
        let got = dwell_delay(qa, qb, milli as f64 / 1000.0, dwell);
        if got != expect {
            return Err(format!(
                "case {i}: ({qa}, {qb}, {}, {dwell}) gave {got}, expected {expect}",
                milli as f64 / 1000.0
            ));
        }
    }
    Ok("worked example 20 s and 1000 random cases exact".into())
}

fn learning_reduces_congestion(runs: &[(Vec<DayResult>, u64)]) -> Outcome {
    let mut total_better = 0;
    let mut denied_halved = 0;
    let mut lines = Vec::new();
    for (days, seed) in runs {
        let (a, b) = (&days[0].report, &days[days.len() - 1].report);
        total_better += (b.total < a.total) as usize;
        denied_halved += (b.denied_per_pax <= 0.5 * a.denied_per_pax) as usize;
        lines.push(format!("{seed}:{:.0}->{:.0}/{:.2}->{:.2}", a.total, b.total, a.denied_per_pax, b.denied_per_pax));
    }
    let n = runs.len();
    ensure(
        n == 10 && total_better >= 9 && denied_halved >= 9,
        format!("total fell in {total_better}/{n}, denied/pax halved in {denied_halved}/{n} [{}]", lines.join(" ")),
    )
}

fn capacity_increase() -> Outcome {
    let (bundle, cfg) = load_fixture("congested");
    let mut better = 0;
    let mut lines = Vec::new();
    for seed in 1..=10 {
        let cfg = SimConfig { days: 1, seed, ..cfg.clone() };
        let out = capacity_experiment(&bundle, &cfg, 40.0).map_err(|e| e.to_string())?;
        let (p, q) = (out.probe.report.total, out.runs[0].report.total);
        better += (q < p) as usize;
        lines.push(format!("{p:.0}->{q:.0}"));
    }
    ensure(better == 10, format!("day-1 total lower in {better}/10 [{}]", lines.join(" ")))
}

fn unlimited_capacity() -> Outcome {
    let (bundle, cfg) = load_fixture("congested");
    let out = unlimited_experiment(&bundle, &cfg).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("diff_loads.csv");
    let (base, unl) = (out.baseline.last().unwrap(), out.unlimited.last().unwrap());
    write_diff_loads(&path, &bundle.network, &base.onboard, &unl.onboard).map_err(|e| e.to_string())?;
    let mut rdr = csv::Reader::from_path(&path).map_err(|e| e.to_string())?;
    let (mut max_load, mut fast_shift, mut slow_shift) = (0.0f64, 0.0, 0.0);
    for row in rdr.records() {
        let row = row.map_err(|e| e.to_string())?;
        let load: f64 = row[6].parse().unwrap();
        let diff: f64 = row[7].parse().unwrap();
        max_load = max_load.max(load);
        let t = bundle.network.trip_id(&row[0]).unwrap();
        if bundle.network.lines[bundle.network.trip(t).line.idx()].code == "FAST" {
            fast_shift += diff;
        } else {
            slow_shift += diff;
        }
    }
    ensure(
        max_load > 2.0 && fast_shift > 0.0 && slow_shift < 0.0,
        format!("max unlimited load {max_load:.2}, summed load change FAST {fast_shift:+.2}, SLOW {slow_shift:+.2}"),
    )
}

fn report_bits(r: &DayReport) -> Vec<u64> {
    let c = &r.components;
    let mut v = vec![r.passengers as u64, r.unfinished_count as u64, r.delayed_events as u64, r.max_delay as u64];
    v.extend(
        [
            r.total,
            c.in_vehicle,
            c.wait,
            c.walk,
            c.transfer,
            c.crowding,
            c.denied,
            c.unfinished,
            r.denied_per_pax,
            r.standing,
        ]
        .map(f64::to_bits),
    );
    v.push(r.realtime.triggered());
    v
}

fn null_dynamics() -> Outcome {
    let (bundle, cfg) = load_fixture("null");
    let mut notes = Vec::new();
    for epsilon in [0.0, 0.2] {
        let cfg = SimConfig { days: 30, epsilon, ..cfg.clone() };
        let days = simulate(&bundle, &bundle.network, &cfg).map_err(|e| e.to_string())?;
        for d in &days {
            let r = &d.report;
            if r.denied_per_pax != 0.0 || d.denied.iter().any(|&x| x > 0) {
                return Err(format!("eps {epsilon} day {}: denied boardings", r.day));
            }
            if r.delayed_events != 0 || r.max_delay != 0 {
                return Err(format!("eps {epsilon} day {}: {} delayed events", r.day, r.delayed_events));
            }
            if r.realtime.triggered() != 0 {
                return Err(format!("eps {epsilon} day {}: {} real-time triggers", r.day, r.realtime.triggered()));
            }
        }
        if epsilon == 0.0 {
            let (a, b) = (&days[0], &days[29]);
            if report_bits(&a.report) != report_bits(&b.report) || a.onboard != b.onboard || a.journeys != b.journeys {
                return Err(format!("day 30 differs from day 1 ({:.3} vs {:.3})", a.report.total, b.report.total));
            }
        }
        notes.push(format!("eps {epsilon}: {} pax/day", days[0].report.passengers));
    }
    Ok(format!(
        "no denials, delays or triggers over 30 days; eps 0 day 30 bit-identical to day 1 ({})",
        notes.join(", ")
    ))
}

fn synthetic_run(threads: usize, days: u32) -> Result<(Network, Vec<DayResult>, f64), String> {
    let raw = synthetic::generate(&SyntheticParams::default());
    let bundle = ptassign::io::validate_bundle(raw, &BuildOptions::default()).map_err(|e| format!("{e:?}"))?;
    let cfg = SimConfig {
        frame_start: 25200,
        frame_end: 32400,
        eval_end: 28800,
        days,
        threads,
        seed: 42,
        gamma: 300.0,
        ..SimConfig::default()
    };
    let pax: Vec<Passenger> =
        generate(&bundle.network, &bundle.od, cfg.frame_start, cfg.frame_end, cfg.seed).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let days = run_simulation(&bundle.network, &cfg, pax).map_err(|e| e.to_string())?;
    Ok((bundle.network, days, start.elapsed().as_secs_f64()))
}

fn performance(synth: &(Network, Vec<DayResult>, f64)) -> Outcome {
    let (net, days, secs) = synth;
    let pax = days[0].journeys.len();
    let one = synthetic_run(1, 30)?;
    let four = synthetic_run(4, 30)?;
    if one.1 != four.1 || one.1 != *days {
        let first = one.1.iter().zip(&four.1).position(|(a, b)| a != b);
        return Err(format!("outputs differ between thread counts (first differing day index {first:?})"));
    }
    ensure(
        *secs <= 60.0,
        format!(
            "{} stops, {} trips, {} arcs, {pax} pax: 30 days in {secs:.1} s; 1 vs 4 threads identical ({:.1} s / {:.1} s)",
            net.stops.len(),
            net.trips.len(),
            net.num_driving_arcs(),
            one.2,
            four.2
        ),
    )
}

fn main() -> ExitCode {
    let (bundle, cfg) = load_fixture("congested");
    let congested: Vec<(Vec<DayResult>, u64)> = (1..=10)
        .map(|seed| {
            let cfg = SimConfig { days: 30, seed, ..cfg.clone() };
            (simulate(&bundle, &bundle.network, &cfg).expect("congested run"), seed)
        })
        .collect();
    let synth = synthetic_run(0, 30).expect("synthetic run");

    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("capacity feasibility", Box::new(|| capacity_feasibility(&congested, &synth))),
        ("profile scan matches exhaustive journeys", Box::new(profile_oracle)),
        ("incremental update equals full recompute", Box::new(incremental_equivalence)),
        ("choice frequencies match probabilities", Box::new(choice_frequencies)),
        ("learning weights and blend", Box::new(learning_identities)),
        ("dwell delay model", Box::new(dwell_model)),
        ("learning relieves congestion", Box::new(|| learning_reduces_congestion(&congested))),
        ("capacity increase on denying trips", Box::new(capacity_increase)),
        ("unlimited capacity shifts load", Box::new(unlimited_capacity)),
        ("null dynamics stay still", Box::new(null_dynamics)),
        ("city-scale run time and thread determinism", Box::new(|| performance(&synth))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all criteria passed");
        ExitCode::SUCCESS
    }
}
