//! Multi-day simulation: configuration, per-passenger state, the daily event
//! loop and the learning step between days.

mod accounting;
mod engine;

pub use accounting::{DayReport, Journey, Ledger};

use rayon::prelude::*;
use thiserror::Error;

use crate::choice::{reduce_choice_set, ChoiceParams};
use crate::demand::{Passenger, PreferenceSet};
use crate::learning::{DayRecord, ExpectedView, Experience, ExperienceStore, LearningParams, WeightTable};
use crate::network::{Network, Time};
use crate::ptt::{compute_initial_profile, Ctx, Profile, ProfileQuery};

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub frame_start: Time,
    pub frame_end: Time,
    /// Passengers starting before this time are evaluated.
    pub eval_end: Time,
    pub days: u32,
    pub seed: u64,
    /// Worker threads; 0 picks the number of cores.
    pub threads: usize,
    pub gamma: f64,
    /// Per-day γ overriding `gamma` for the first days.
    pub gamma_schedule: Vec<f64>,
    pub epsilon: f64,
    pub kappa: f64,
    pub lambda_std: f64,
    pub delta_tau: Time,
    pub sample_window: usize,
    /// Preference sets by passenger class; class 0 is the default.
    pub classes: Vec<PreferenceSet>,
    pub max_footpath: Time,
    pub default_headway: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            frame_start: 0,
            frame_end: 7200,
            eval_end: 3600,
            days: 30,
            seed: 1,
            threads: 0,
            gamma: 400.0,
            gamma_schedule: Vec::new(),
            epsilon: 0.2,
            kappa: 0.5,
            lambda_std: 0.5,
            delta_tau: 3600,
            sample_window: 64,
            classes: vec![PreferenceSet::default()],
            max_footpath: Time::MAX,
            default_headway: 3600.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("passenger {0} has unknown class {1}")]
    UnknownClass(u32, usize),
    #[error("thread pool: {0}")]
    Threads(String),
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: String| Err(SimError::Config(m));
        if self.days < 1 {
            return err("days must be at least 1".into());
        }
        if self.frame_end <= self.frame_start {
            return err(format!("empty frame {}..{}", self.frame_start, self.frame_end));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return err("kappa must be positive".into());
        }
        if !(self.lambda_std >= 0.0) || !self.lambda_std.is_finite() {
            return err("lambda_std must be non-negative".into());
        }
        if self.delta_tau < 0 {
            return err("delta_tau must be non-negative".into());
        }
        if self.sample_window == 0 {
            return err("sample_window must be positive".into());
        }
        if self.classes.is_empty() {
            return err("at least one preference class is required".into());
        }
        for (i, c) in self.classes.iter().enumerate() {
            c.validate().map_err(|e| SimError::Config(format!("class {i}: {e}")))?;
        }
        for day in 1..=self.days {
            self.choice_params(day).validate().map_err(SimError::Config)?;
        }
        Ok(())
    }

    pub fn gamma_for(&self, day: u32) -> f64 {
        self.gamma_schedule.get(day as usize - 1).copied().unwrap_or(self.gamma)
    }

    pub fn choice_params(&self, day: u32) -> ChoiceParams {
        ChoiceParams { gamma: self.gamma_for(day), epsilon: self.epsilon }
    }

    pub fn prefs(&self, class: usize) -> &PreferenceSet {
        &self.classes[class]
    }

    pub fn learning(&self) -> LearningParams {
        LearningParams { kappa: self.kappa, sample_window: self.sample_window }
    }
}

/// A passenger with everything carried from one day to the next.
#[derive(Clone, Debug)]
pub struct Agent {
    pub pax: Passenger,
    pub store: ExperienceStore,
    pub profile: Profile,
}

impl Agent {
    pub fn routable(&self) -> bool {
        self.profile.earliest_arrival.is_some()
    }
}

/// Outcome of one simulated day.
#[derive(Clone, Debug, PartialEq)]
pub struct DayResult {
    pub report: DayReport,
    pub record: DayRecord,
    /// Per event: passengers on the driving arc leaving a departure.
    pub onboard: Vec<u32>,
    /// Per event: denied boarding attempts at a departure.
    pub denied: Vec<u32>,
    pub journeys: Vec<Journey>,
    /// Departures after which more passengers were on board than allowed.
    pub capacity_violations: usize,
}

pub struct Simulation<'n> {
    net: &'n Network,
    config: SimConfig,
    agents: Vec<Agent>,
    weights: WeightTable,
    day: u32,
}

impl<'n> Simulation<'n> {
    /// Builds every passenger's filtered profile under default expectations.
    pub fn new(net: &'n Network, config: SimConfig, passengers: Vec<Passenger>) -> Result<Self, SimError> {
        config.validate()?;
        for (i, p) in passengers.iter().enumerate() {
            if p.id as usize != i || passengers.get(i + 1).is_some_and(|q| q.tau_start < p.tau_start) {
                return Err(SimError::Config("passengers must be numbered 0.. in order of start time".into()));
            }
        }
        if let Some(p) = passengers.iter().find(|p| p.class >= config.classes.len()) {
            return Err(SimError::UnknownClass(p.id, p.class));
        }
        let weights = WeightTable::new(config.sample_window, config.kappa);
        let agents = passengers.into_par_iter().map(|pax| initial_agent(net, &config, &weights, pax)).collect();
        Ok(Simulation { net, config, agents, weights, day: 0 })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    /// Ids of passengers who cannot reach their destination at all.
    pub fn unroutable(&self) -> Vec<u32> {
        self.agents.iter().filter(|a| !a.routable()).map(|a| a.pax.id).collect()
    }

    /// Days simulated so far.
    pub fn day(&self) -> u32 {
        self.day
    }

    /// Simulates the next day without learning from it.
    pub fn run_day(&self) -> DayResult {
        engine::run_day(self.net, &self.config, &self.agents, &self.weights, self.day + 1)
    }

    /// Integrates a day's observations into every passenger's expectations.
    pub fn learn(&mut self, result: &DayResult) {
        let (net, config, weights) = (self.net, &self.config, &self.weights);
        let params = config.learning();
        self.agents.par_iter_mut().zip(result.journeys.par_iter()).for_each(|(agent, journey)| {
            let exp = Experience { segments: &journey.segments, denied: &journey.denied };
            let changed = agent.store.end_of_day(net, exp, &result.record, &params);
            if changed.is_empty() {
                return;
            }
            let ctx = Ctx { net, prefs: config.prefs(agent.pax.class), dest: agent.pax.dest };
            let view = ExpectedView { net, store: &agent.store, lambda_std: config.lambda_std, weights };
            agent.profile.update(&ctx, &view, &changed);
        });
        self.day += 1;
    }

    /// Simulates and learns from one day.
    pub fn step(&mut self) -> DayResult {
        let r = self.run_day();
        self.learn(&r);
        r
    }

    /// Runs the remaining configured days.
    pub fn run(&mut self) -> Vec<DayResult> {
        (self.day..self.config.days).map(|_| self.step()).collect()
    }
}

fn initial_agent(net: &Network, config: &SimConfig, weights: &WeightTable, pax: Passenger) -> Agent {
    let ctx = Ctx { net, prefs: config.prefs(pax.class), dest: pax.dest };
    let q = ProfileQuery {
        origin: pax.origin,
        tau_start: pax.tau_start,
        lambda_std: config.lambda_std,
        delta_tau: config.delta_tau,
        frame_end: config.frame_end,
    };
    let ip = compute_initial_profile(&ctx, &q);
    let universe = reduce_choice_set(&ctx, &ip, pax.origin, pax.tau_start, config.lambda_std);
    let mut profile = Profile::new(universe, ip.earliest_arrival);
    let store = ExperienceStore::default();
    profile.full_recompute(&ctx, &ExpectedView { net, store: &store, lambda_std: config.lambda_std, weights });
    Agent { pax, store, profile }
}

/// Runs `config.days` days in a pool of `config.threads` workers.
pub fn run_simulation(
    net: &Network,
    config: &SimConfig,
    passengers: Vec<Passenger>,
) -> Result<Vec<DayResult>, SimError> {
    with_pool(config.threads, || {
        let mut sim = Simulation::new(net, config.clone(), passengers)?;
        Ok(sim.run())
    })
}

/// Runs `f` inside a dedicated thread pool.
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T, SimError> + Send) -> Result<T, SimError> {
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| SimError::Threads(e.to_string()))?;
    pool.install(f)
}
