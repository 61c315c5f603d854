//! CSV report writers.

use std::fs::File;
use std::io;
use std::path::Path;

use crate::network::{EventId, Network};
use crate::sim::{DayReport, Journey};

fn writer(path: &Path) -> io::Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(csv::Writer::from_writer(File::create(path)?))
}

/// One row per day.
pub fn write_day_reports(path: &Path, reports: &[DayReport]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(DayReport::HEADER)?;
    for r in reports {
        w.write_record(r.row())?;
    }
    w.flush()
}

fn arc_fields(net: &Network, d: EventId) -> [String; 5] {
    let ev = net.event(d);
    let a = EventId(d.0 + 1);
    [
        net.trip(ev.trip).code.clone(),
        ev.seq.to_string(),
        net.event(a).seq.to_string(),
        net.stops[ev.stop.idx()].code.clone(),
        net.stops[net.stop_of(a).idx()].code.clone(),
    ]
}

fn seat_load(net: &Network, d: EventId, onboard: u32) -> f64 {
    onboard as f64 / net.trip_of(d).cap_sit as f64
}

/// Onboard count and seat-relative load of every driving arc; `onboard` is
/// indexed by departure event.
pub fn write_arc_loads(path: &Path, net: &Network, onboard: &[u32]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trip", "from_seq", "to_seq", "from_stop", "to_stop", "onboard", "load"])?;
    for &d in net.arcs_by_time() {
        let n = onboard[d.idx()];
        let mut row = arc_fields(net, d).to_vec();
        row.push(n.to_string());
        row.push(format!("{:.6}", seat_load(net, d, n)));
        w.write_record(&row)?;
    }
    w.flush()
}

/// Seat-relative loads of two runs on the same timetable and their difference.
pub fn write_diff_loads(path: &Path, net: &Network, base: &[u32], other: &[u32]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trip", "from_seq", "to_seq", "from_stop", "to_stop", "base_load", "load", "diff"])?;
    for &d in net.arcs_by_time() {
        let (b, o) = (seat_load(net, d, base[d.idx()]), seat_load(net, d, other[d.idx()]));
        let mut row = arc_fields(net, d).to_vec();
        row.extend([format!("{b:.6}"), format!("{o:.6}"), format!("{:.6}", o - b)]);
        w.write_record(&row)?;
    }
    w.flush()
}

/// One row per passenger; segments are `trip:from_seq-to_seq` joined by `;`.
pub fn write_journeys(path: &Path, net: &Network, journeys: &[Journey]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "passenger",
        "evaluated",
        "finished",
        "arrival",
        "end_stop",
        "segments",
        "denied",
        "in_vehicle",
        "wait",
        "walk",
        "transfer",
        "crowding",
        "denied_surcharge",
        "unfinished_penalty",
        "total",
    ])?;
    for j in journeys {
        let segs: Vec<String> = j
            .segments
            .iter()
            .map(|&(b, x)| format!("{}:{}-{}", net.trip_of(b).code, net.event(b).seq, net.event(x).seq))
            .collect();
        let l = &j.ledger;
        let f = |x: f64| format!("{x:.3}");
        w.write_record([
            j.passenger.to_string(),
            j.evaluated.to_string(),
            j.finished.to_string(),
            j.arrival.map(|t| t.to_string()).unwrap_or_default(),
            net.stops[j.end_stop.idx()].code.clone(),
            segs.join(";"),
            j.denied.len().to_string(),
            f(l.in_vehicle),
            f(l.wait),
            f(l.walk),
            f(l.transfer),
            f(l.crowding),
            f(l.denied),
            f(l.unfinished),
            f(l.total()),
        ])?;
    }
    w.flush()
}
