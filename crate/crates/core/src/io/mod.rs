//! CSV input bundles, the key=value configuration format and report writers.

mod config;
mod output;

pub use config::{parse_config, read_config, ConfigError};
pub use output::{write_arc_loads, write_day_reports, write_diff_loads, write_journeys};

use std::fmt;
use std::fs::File;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::demand::OdEntry;
use crate::network::{
    BuildOptions, DependencyRow, FootpathRow, Network, NetworkInput, StopRow, StopTimeRow, Time, TripRow,
};

/// A problem in an input file, located by file name and 1-based line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoError {
    pub file: String,
    pub line: Option<u64>,
    pub message: String,
}

impl IoError {
    fn new(file: &str, line: Option<u64>, message: impl Into<String>) -> Self {
        IoError { file: file.into(), line, message: message.into() }
    }
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.file, l, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

impl std::error::Error for IoError {}

#[derive(Clone, Debug, PartialEq)]
pub struct OdRow {
    pub origin: String,
    pub dest: String,
    pub per_hour: f64,
    pub class: usize,
}

/// Parsed input tables with the line each row came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawBundle {
    pub network: NetworkInput,
    pub od: Vec<OdRow>,
    lines: Lines,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Lines {
    stops: Vec<u64>,
    footpaths: Vec<u64>,
    trips: Vec<u64>,
    stop_times: Vec<u64>,
    dependencies: Vec<u64>,
}

impl RawBundle {
    pub fn new(network: NetworkInput, od: Vec<OdRow>) -> Self {
        let seq = |n: usize| (0..n as u64).map(|i| i + 2).collect();
        let lines = Lines {
            stops: seq(network.stops.len()),
            footpaths: seq(network.footpaths.len()),
            trips: seq(network.trips.len()),
            stop_times: seq(network.stop_times.len()),
            dependencies: seq(network.dependencies.len()),
        };
        RawBundle { network, od, lines }
    }
}

/// A validated network with its demand.
#[derive(Clone, Debug)]
pub struct NetworkBundle {
    pub raw: RawBundle,
    pub network: Network,
    pub od: Vec<OdEntry>,
}

#[derive(Deserialize, Serialize)]
struct StopRec {
    id: String,
    name: String,
    x: f64,
    y: f64,
    mct: Time,
}

#[derive(Deserialize, Serialize)]
struct FootpathRec {
    from: String,
    to: String,
    length_s: Time,
}

#[derive(Deserialize, Serialize)]
struct TripRec {
    trip: String,
    line: String,
    cap_sit: u32,
    cap: u32,
    door_capacity: f64,
}

#[derive(Deserialize, Serialize)]
struct StopTimeRec {
    trip: String,
    seq: u32,
    stop: String,
    arr_s: Time,
    dep_s: Time,
    min_drive_s: Time,
    min_dwell_s: Time,
}

#[derive(Deserialize, Serialize)]
struct DependencyRec {
    from_trip: String,
    to_trip: String,
    min_turnaround_s: Time,
}

#[derive(Deserialize, Serialize)]
struct OdRec {
    origin: String,
    dest: String,
    per_hour: f64,
    #[serde(default)]
    class: usize,
}

const STOPS: (&str, &[&str]) = ("stops.csv", &["id", "name", "x", "y", "mct"]);
const FOOTPATHS: (&str, &[&str]) = ("footpaths.csv", &["from", "to", "length_s"]);
const TRIPS: (&str, &[&str]) = ("trips.csv", &["trip", "line", "cap_sit", "cap", "door_capacity"]);
const STOP_TIMES: (&str, &[&str]) =
    ("stop_times.csv", &["trip", "seq", "stop", "arr_s", "dep_s", "min_drive_s", "min_dwell_s"]);
const DEPENDENCIES: (&str, &[&str]) = ("dependencies.csv", &["from_trip", "to_trip", "min_turnaround_s"]);
const OD: (&str, &[&str]) = ("od.csv", &["origin", "dest", "per_hour"]);

/// Reads one table; the header must start with `columns`.
fn read_table<T: DeserializeOwned>(
    dir: &Path,
    (file, columns): (&str, &[&str]),
    errors: &mut Vec<IoError>,
) -> Vec<(u64, T)> {
    let mut out = Vec::new();
    let mut rdr = match csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(dir.join(file)) {
        Ok(r) => r,
        Err(e) => {
            errors.push(IoError::new(file, None, format!("cannot open: {e}")));
            return out;
        }
    };
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            errors.push(IoError::new(file, Some(1), e.to_string()));
            return out;
        }
    };
    let got: Vec<&str> = headers.iter().collect();
    if got.len() < columns.len() || got[..columns.len()] != *columns {
        errors.push(IoError::new(
            file,
            Some(1),
            format!("expected header {}, found {}", columns.join(","), got.join(",")),
        ));
        return out;
    }
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                errors.push(IoError::new(file, e.position().map(|p| p.line()), e.to_string()));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        match rec.deserialize::<T>(Some(&headers)) {
            Ok(r) => out.push((line, r)),
            Err(e) => errors.push(IoError::new(file, Some(line), e.to_string())),
        }
    }
    out
}

/// Parses all six tables, collecting every problem.
pub fn read_bundle(dir: &Path) -> Result<RawBundle, Vec<IoError>> {
    let mut errors = Vec::new();
    let stops: Vec<(u64, StopRec)> = read_table(dir, STOPS, &mut errors);
    let footpaths: Vec<(u64, FootpathRec)> = read_table(dir, FOOTPATHS, &mut errors);
    let trips: Vec<(u64, TripRec)> = read_table(dir, TRIPS, &mut errors);
    let stop_times: Vec<(u64, StopTimeRec)> = read_table(dir, STOP_TIMES, &mut errors);
    let deps: Vec<(u64, DependencyRec)> = read_table(dir, DEPENDENCIES, &mut errors);
    let od: Vec<(u64, OdRec)> = read_table(dir, OD, &mut errors);
    if !errors.is_empty() {
        return Err(errors);
    }
    let network = NetworkInput {
        stops: stops
            .iter()
            .map(|(_, r)| StopRow { id: r.id.clone(), name: r.name.clone(), x: r.x, y: r.y, mct: r.mct })
            .collect(),
        footpaths: footpaths
            .iter()
            .map(|(_, r)| FootpathRow { from: r.from.clone(), to: r.to.clone(), length: r.length_s })
            .collect(),
        trips: trips
            .iter()
            .map(|(_, r)| TripRow {
                trip: r.trip.clone(),
                line: r.line.clone(),
                cap_sit: r.cap_sit,
                cap: r.cap,
                door_capacity: r.door_capacity,
            })
            .collect(),
        stop_times: stop_times
            .iter()
            .map(|(_, r)| StopTimeRow {
                trip: r.trip.clone(),
                seq: r.seq,
                stop: r.stop.clone(),
                arr: r.arr_s,
                dep: r.dep_s,
                min_drive: r.min_drive_s,
                min_dwell: r.min_dwell_s,
            })
            .collect(),
        dependencies: deps
            .iter()
            .map(|(_, r)| DependencyRow {
                from_trip: r.from_trip.clone(),
                to_trip: r.to_trip.clone(),
                min_turnaround: r.min_turnaround_s,
            })
            .collect(),
    };
    let lines = Lines {
        stops: stops.iter().map(|x| x.0).collect(),
        footpaths: footpaths.iter().map(|x| x.0).collect(),
        trips: trips.iter().map(|x| x.0).collect(),
        stop_times: stop_times.iter().map(|x| x.0).collect(),
        dependencies: deps.iter().map(|x| x.0).collect(),
    };
    let od = od
        .into_iter()
        .map(|(_, r)| OdRow { origin: r.origin, dest: r.dest, per_hour: r.per_hour, class: r.class })
        .collect();
    Ok(RawBundle { network, od, lines })
}

/// Builds and validates the network and resolves the OD table against it.
pub fn validate_bundle(raw: RawBundle, opts: &BuildOptions) -> Result<NetworkBundle, Vec<IoError>> {
    let network = match Network::build(&raw.network, opts) {
        Ok(n) => n,
        Err(errs) => {
            return Err(errs
                .into_iter()
                .map(|e| {
                    let (file, lines) = match e.table {
                        "stops" => ("stops.csv", Some(&raw.lines.stops)),
                        "footpaths" => ("footpaths.csv", Some(&raw.lines.footpaths)),
                        "trips" => ("trips.csv", Some(&raw.lines.trips)),
                        "stop_times" => ("stop_times.csv", Some(&raw.lines.stop_times)),
                        "dependencies" => ("dependencies.csv", Some(&raw.lines.dependencies)),
                        _ => ("stop_times.csv", None),
                    };
                    let line = e.row.and_then(|r| lines.and_then(|l| l.get(r).copied()).or(Some(r as u64 + 2)));
                    IoError::new(file, line, e.message)
                })
                .collect())
        }
    };
    let mut errors = Vec::new();
    let mut od = Vec::with_capacity(raw.od.len());
    for (i, r) in raw.od.iter().enumerate() {
        let line = Some(i as u64 + 2);
        match (network.stop_id(&r.origin), network.stop_id(&r.dest)) {
            (Some(o), Some(d)) if o != d && r.per_hour.is_finite() && r.per_hour >= 0.0 => {
                od.push(OdEntry { origin: o, dest: d, rate: r.per_hour, class: r.class })
            }
            (None, _) => errors.push(IoError::new("od.csv", line, format!("unknown stop '{}'", r.origin))),
            (_, None) => errors.push(IoError::new("od.csv", line, format!("unknown stop '{}'", r.dest))),
            (Some(o), Some(d)) if o == d => errors.push(IoError::new("od.csv", line, "origin equals destination")),
            _ => errors.push(IoError::new("od.csv", line, "per_hour must be finite and non-negative")),
        }
    }
    if errors.is_empty() {
        Ok(NetworkBundle { raw, network, od })
    } else {
        Err(errors)
    }
}

/// Reads and validates the bundle in `dir`.
pub fn load_bundle(dir: &Path, opts: &BuildOptions) -> Result<NetworkBundle, Vec<IoError>> {
    validate_bundle(read_bundle(dir)?, opts)
}

fn write_table<T: Serialize>(
    dir: &Path,
    (file, columns): (&str, &[&str]),
    rows: impl Iterator<Item = T>,
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(File::create(dir.join(file))?);
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

/// Writes the six tables of `raw` into `dir`.
pub fn write_bundle(dir: &Path, raw: &RawBundle) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let n = &raw.network;
    write_table(
        dir,
        STOPS,
        n.stops.iter().map(|r| StopRec { id: r.id.clone(), name: r.name.clone(), x: r.x, y: r.y, mct: r.mct }),
    )?;
    write_table(
        dir,
        FOOTPATHS,
        n.footpaths.iter().map(|r| FootpathRec { from: r.from.clone(), to: r.to.clone(), length_s: r.length }),
    )?;
    write_table(
        dir,
        TRIPS,
        n.trips.iter().map(|r| TripRec {
            trip: r.trip.clone(),
            line: r.line.clone(),
            cap_sit: r.cap_sit,
            cap: r.cap,
            door_capacity: r.door_capacity,
        }),
    )?;
    write_table(
        dir,
        STOP_TIMES,
        n.stop_times.iter().map(|r| StopTimeRec {
            trip: r.trip.clone(),
            seq: r.seq,
            stop: r.stop.clone(),
            arr_s: r.arr,
            dep_s: r.dep,
            min_drive_s: r.min_drive,
            min_dwell_s: r.min_dwell,
        }),
    )?;
    write_table(
        dir,
        DEPENDENCIES,
        n.dependencies.iter().map(|r| DependencyRec {
            from_trip: r.from_trip.clone(),
            to_trip: r.to_trip.clone(),
            min_turnaround_s: r.min_turnaround,
        }),
    )?;
    write_table(
        dir,
        (OD.0, &["origin", "dest", "per_hour", "class"]),
        raw.od.iter().map(|r| OdRec {
            origin: r.origin.clone(),
            dest: r.dest.clone(),
            per_hour: r.per_hour,
            class: r.class,
        }),
    )
}
