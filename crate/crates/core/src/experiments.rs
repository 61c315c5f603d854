//! Scenario runs built on the simulator: capacity increase on denied trips and
//! unlimited capacity against a baseline.

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::demand::{generate, DemandError, Passenger};
use crate::io::NetworkBundle;
use crate::network::{BuildOptions, Network, NetworkError, NetworkInput, TripId};
use crate::sim::{run_simulation, DayResult, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error("modified network is invalid: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Network(Vec<NetworkError>),
}

pub fn build_options(cfg: &SimConfig) -> BuildOptions {
    BuildOptions { max_footpath: cfg.max_footpath, default_headway: cfg.default_headway }
}

/// Passengers of the whole frame for the configured seed.
pub fn passengers(bundle: &NetworkBundle, cfg: &SimConfig) -> Result<Vec<Passenger>, DemandError> {
    generate(&bundle.network, &bundle.od, cfg.frame_start, cfg.frame_end, cfg.seed)
}

/// Runs `cfg.days` days on `net` with the bundle's demand.
pub fn simulate(bundle: &NetworkBundle, net: &Network, cfg: &SimConfig) -> Result<Vec<DayResult>, ExperimentError> {
    Ok(run_simulation(net, cfg, passengers(bundle, cfg)?)?)
}

/// Raises both capacities of the given trips by `pct` percent, rounding up.
pub fn scale_capacity(input: &NetworkInput, trips: &FxHashSet<String>, pct: f64) -> NetworkInput {
    let f = 1.0 + pct / 100.0;
    let scale = |x: u32| ((x as f64 * f) - 1e-9).ceil().max(x as f64) as u32;
    let mut out = input.clone();
    for t in out.trips.iter_mut().filter(|t| trips.contains(&t.trip) && t.cap != u32::MAX) {
        t.cap = scale(t.cap);
        t.cap_sit = scale(t.cap_sit).min(t.cap);
    }
    out
}

/// Every trip treated as having room for everyone.
pub fn unlimited_capacity(input: &NetworkInput) -> NetworkInput {
    let mut out = input.clone();
    for t in &mut out.trips {
        t.cap = u32::MAX;
    }
    out
}

#[derive(Clone, Debug)]
pub struct CapacityOutcome {
    /// Day 1 on the original network.
    pub probe: DayResult,
    /// Trips that had at least one denied boarding in the probe.
    pub raised: Vec<String>,
    pub network: Network,
    pub runs: Vec<DayResult>,
}

/// One-day probe, then a run with more capacity on every trip that denied a boarding.
pub fn capacity_experiment(
    bundle: &NetworkBundle,
    cfg: &SimConfig,
    pct: f64,
) -> Result<CapacityOutcome, ExperimentError> {
    let net = &bundle.network;
    let probe_cfg = SimConfig { days: 1, ..cfg.clone() };
    let probe = simulate(bundle, net, &probe_cfg)?.remove(0);
    let mut raised: Vec<TripId> = Vec::new();
    for (i, t) in net.trips.iter().enumerate() {
        let denied: u32 = t.events().map(|e| probe.denied[e.idx()]).sum();
        if denied > 0 {
            raised.push(TripId(i as u32));
        }
    }
    let codes: Vec<String> = raised.iter().map(|&t| net.trip(t).code.clone()).collect();
    let set: FxHashSet<String> = codes.iter().cloned().collect();
    let input = scale_capacity(&bundle.raw.network, &set, pct);
    let network = Network::build(&input, &build_options(cfg)).map_err(ExperimentError::Network)?;
    let runs = simulate(bundle, &network, cfg)?;
    Ok(CapacityOutcome { probe, raised: codes, network, runs })
}

#[derive(Clone, Debug)]
pub struct UnlimitedOutcome {
    pub baseline: Vec<DayResult>,
    pub network: Network,
    pub unlimited: Vec<DayResult>,
}

pub fn unlimited_experiment(bundle: &NetworkBundle, cfg: &SimConfig) -> Result<UnlimitedOutcome, ExperimentError> {
    let baseline = simulate(bundle, &bundle.network, cfg)?;
    let network = Network::build(&unlimited_capacity(&bundle.raw.network), &build_options(cfg))
        .map_err(ExperimentError::Network)?;
    let unlimited = simulate(bundle, &network, cfg)?;
    Ok(UnlimitedOutcome { baseline, network, unlimited })
}
