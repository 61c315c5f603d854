//! Passenger preferences and expansion of the OD matrix into agents.

use rand::Rng;
use thiserror::Error;

use crate::network::{Network, StopId, Time};
use crate::rng::{stream, Tag};

/// One load band of the crowding step function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrowdingBand {
    /// Inclusive upper load of the band; the last band also covers anything above.
    pub upper: f64,
    pub seated: f64,
    pub standing: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrowdingTable {
    bands: Vec<CrowdingBand>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PreferenceError {
    #[error("crowding table is empty")]
    EmptyTable,
    #[error("crowding bands must have increasing upper bounds")]
    UnorderedBands,
    #[error("crowding factors must be non-decreasing in load")]
    DecreasingFactor,
    #[error("standing factor below seated factor in band ending at {0}")]
    StandingBelowSeated(f64),
    #[error("preference coefficient {0} must be finite and non-negative")]
    Negative(&'static str),
}

impl CrowdingTable {
    pub fn new(bands: Vec<CrowdingBand>) -> Result<Self, PreferenceError> {
        if bands.is_empty() {
            return Err(PreferenceError::EmptyTable);
        }
        for w in bands.windows(2) {
            if !(w[1].upper > w[0].upper) {
                return Err(PreferenceError::UnorderedBands);
            }
            if w[1].seated < w[0].seated || w[1].standing < w[0].standing {
                return Err(PreferenceError::DecreasingFactor);
            }
        }
        for b in &bands {
            if b.standing < b.seated {
                return Err(PreferenceError::StandingBelowSeated(b.upper));
            }
            if !(b.seated >= 0.0) {
                return Err(PreferenceError::Negative("crowding"));
            }
        }
        Ok(CrowdingTable { bands })
    }

    pub fn bands(&self) -> &[CrowdingBand] {
        &self.bands
    }

    #[inline]
    pub fn factor(&self, load: f64, seated: bool) -> f64 {
        let b = self.bands.iter().find(|b| load <= b.upper).unwrap_or_else(|| self.bands.last().unwrap());
        if seated {
            b.seated
        } else {
            b.standing
        }
    }
}

impl Default for CrowdingTable {
    /// Standing below a load of 1 has no published value; it takes the 2.2 of the
    /// crowded band so that an expected load of exactly 1 is penalised.
    fn default() -> Self {
        CrowdingTable {
            bands: vec![
                CrowdingBand { upper: 0.6, seated: 1.0, standing: 2.2 },
                CrowdingBand { upper: 1.0, seated: 1.2, standing: 2.2 },
                CrowdingBand { upper: 2.0, seated: 1.4, standing: 2.2 },
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceSet {
    pub beta_wait: f64,
    pub beta_walk: f64,
    pub beta_transfer: f64,
    pub beta_fail: f64,
    pub crowding: CrowdingTable,
    /// Perceived seconds per metre of remaining distance for unfinished journeys.
    pub unfinished_scale: f64,
}

impl Default for PreferenceSet {
    fn default() -> Self {
        PreferenceSet {
            beta_wait: 1.0,
            beta_walk: 1.5,
            beta_transfer: 300.0,
            beta_fail: 2.0,
            crowding: CrowdingTable::default(),
            unfinished_scale: 1.0,
        }
    }
}

impl PreferenceSet {
    pub fn validate(&self) -> Result<(), PreferenceError> {
        for (name, v) in [
            ("beta_wait", self.beta_wait),
            ("beta_walk", self.beta_walk),
            ("beta_transfer", self.beta_transfer),
            ("beta_fail", self.beta_fail),
            ("unfinished_scale", self.unfinished_scale),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(PreferenceError::Negative(name));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdEntry {
    pub origin: StopId,
    pub dest: StopId,
    /// Passengers per hour.
    pub rate: f64,
    /// Index into the preference classes.
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Passenger {
    pub id: u32,
    pub origin: StopId,
    pub dest: StopId,
    pub tau_start: Time,
    pub class: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum DemandError {
    #[error("generation window is empty ({0}..{1})")]
    EmptyWindow(Time, Time),
    #[error("OD entry {0}: unknown stop")]
    UnknownStop(usize),
    #[error("OD entry {0}: origin equals destination")]
    SameStop(usize),
    #[error("OD entry {0}: rate must be finite and non-negative")]
    BadRate(usize),
}

/// Expands hourly OD rates into passengers with start times uniform in `[t0, t1)`.
/// Counts use stochastic rounding so fractional expectations are honoured.
pub fn generate(net: &Network, od: &[OdEntry], t0: Time, t1: Time, seed: u64) -> Result<Vec<Passenger>, DemandError> {
    if t1 <= t0 {
        return Err(DemandError::EmptyWindow(t0, t1));
    }
    let hours = (t1 - t0) as f64 / 3600.0;
    let mut out = Vec::new();
    for (i, e) in od.iter().enumerate() {
        if e.origin.idx() >= net.stops.len() || e.dest.idx() >= net.stops.len() {
            return Err(DemandError::UnknownStop(i));
        }
        if e.origin == e.dest {
            return Err(DemandError::SameStop(i));
        }
        if !(e.rate >= 0.0) || !e.rate.is_finite() {
            return Err(DemandError::BadRate(i));
        }
        let mut rng = stream(seed, Tag::Demand, &[i as u64]);
        let expected = e.rate * hours;
        let mut n = expected.floor() as u64;
        let frac = expected - n as f64;
        if frac > 0.0 && rng.gen::<f64>() < frac {
            n += 1;
        }
        let mut starts: Vec<Time> = (0..n).map(|_| rng.gen_range(t0..t1)).collect();
        starts.sort_unstable();
        for s in starts {
            out.push(Passenger { id: 0, origin: e.origin, dest: e.dest, tau_start: s, class: e.class });
        }
    }
    out.sort_by_key(|p| (p.tau_start, p.origin, p.dest));
    for (i, p) in out.iter_mut().enumerate() {
        p.id = i as u32;
    }
    Ok(out)
}
