use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::benchmark::{csv_err, BenchmarkRecord, RunStatus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub model: String,
    pub infer_seconds: f64,
    pub f1: f64,
    pub on_frontier: bool,
}

/// Flags the points not dominated by another point that is no slower and
/// no worse, and strictly better in one of the two. Identical points are
/// all kept.
pub fn pareto_frontier(points: &[(f64, f64)]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].0.total_cmp(&points[b].0));
    let mut flags = vec![false; points.len()];
    let mut best_faster = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        let time = points[order[i]].0;
        let mut j = i;
        while j < order.len() && points[order[j]].0 == time {
            j += 1;
        }
        let group_best = order[i..j].iter().map(|&k| points[k].1).fold(f64::NEG_INFINITY, f64::max);
        for &k in &order[i..j] {
            flags[k] = points[k].1 == group_best && points[k].1 > best_faster;
        }
        best_faster = best_faster.max(group_best);
        i = j;
    }
    flags
}

/// Mean inference time and F1 of every model over its successful records,
/// flagged against each other.
pub fn frontier_from_records(records: &[BenchmarkRecord]) -> Vec<FrontierPoint> {
    let mut acc: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.status == RunStatus::Ok) {
        let e = acc.entry(r.model.as_str()).or_default();
        e.0 += r.infer_seconds;
        e.1 += r.f1;
        e.2 += 1;
    }
    let mut points: Vec<FrontierPoint> = acc
        .into_iter()
        .map(|(m, (t, f, n))| FrontierPoint {
            model: m.to_string(),
            infer_seconds: t / n as f64,
            f1: f / n as f64,
            on_frontier: false,
        })
        .collect();
    let flags = pareto_frontier(&points.iter().map(|p| (p.infer_seconds, p.f1)).collect::<Vec<_>>());
    for (p, f) in points.iter_mut().zip(flags) {
        p.on_frontier = f;
    }
    points
}

pub fn write_frontier<W: Write>(points: &[FrontierPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("frontier", e))
}

pub fn read_frontier<R: Read>(input: R) -> Result<Vec<FrontierPoint>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}
