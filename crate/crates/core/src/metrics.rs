//! Summary statistics of a trajectory relative to the light.

use serde::Serialize;

use crate::engine::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::kinetics::Vec2;

/// Share of leading records excluded from the settled statistics.
pub const DEFAULT_TRANSIENT_FRACTION: f64 = 0.2;
/// A cycle starts when the distance drops below this multiple of `D0`...
pub const APPROACH_FACTOR: f64 = 0.25;
/// ...and completes when it climbs back above this one.
pub const RETREAT_FACTOR: f64 = 0.5;
/// Final distance beyond this multiple of `D0` counts as escape.
pub const ESCAPE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryMetrics {
    /// Distance of the first record, `D0`.
    pub initial_dist: f64,
    pub final_dist: f64,
    /// Mean distance after the transient.
    pub mean_dist: f64,
    /// Median distance after the transient.
    pub median_dist: f64,
    /// Smallest distance over the whole run.
    pub min_dist: f64,
    /// Largest distance after the transient.
    pub max_dist: f64,
    /// Root-mean-square distance from the light after the transient.
    pub radius_of_gyration: f64,
    pub approach_retreat_cycles: usize,
    pub escaped: bool,
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Completed approach/retreat cycles of a distance series: each time the
/// distance falls below `r_in` and afterwards rises above `r_out`.
pub fn count_cycles(dists: &[f64], r_in: f64, r_out: f64) -> usize {
    let mut near = false;
    let mut cycles = 0;
    for &d in dists {
        if !near && d < r_in {
            near = true;
        } else if near && d > r_out {
            near = false;
            cycles += 1;
        }
    }
    cycles
}

pub fn compute_metrics(records: &[TrajectoryRecord], light: Vec2, transient_fraction: f64) -> Result<TrajectoryMetrics> {
    if records.is_empty() {
        return Err(Error::Invalid("no trajectory records".into()));
    }
    if !(0.0..1.0).contains(&transient_fraction) {
        return Err(Error::Invalid(format!(
            "transient_fraction {transient_fraction} outside [0, 1)"
        )));
    }
    let dists: Vec<f64> = records.iter().map(|r| r.position().distance(light)).collect();
    metrics_from_distances(&dists, transient_fraction)
}

/// [`compute_metrics`] on a bare distance series.
pub fn metrics_from_distances(dists: &[f64], transient_fraction: f64) -> Result<TrajectoryMetrics> {
    if dists.is_empty() {
        return Err(Error::Invalid("empty distance series".into()));
    }
    let d0 = dists[0];
    let skip = ((dists.len() as f64 * transient_fraction).floor() as usize).min(dists.len() - 1);
    let settled = &dists[skip..];
    let n = settled.len() as f64;
    let final_dist = *dists.last().expect("non-empty");
    Ok(TrajectoryMetrics {
        initial_dist: d0,
        final_dist,
        mean_dist: settled.iter().sum::<f64>() / n,
        median_dist: median(settled),
        min_dist: dists.iter().copied().fold(f64::INFINITY, f64::min),
        max_dist: settled.iter().copied().fold(0.0, f64::max),
        radius_of_gyration: (settled.iter().map(|d| d * d).sum::<f64>() / n).sqrt(),
        approach_retreat_cycles: count_cycles(dists, APPROACH_FACTOR * d0, RETREAT_FACTOR * d0),
        escaped: final_dist > ESCAPE_FACTOR * d0,
    })
}

impl TrajectoryMetrics {
    /// The run came within `APPROACH_FACTOR · D0` of the light.
    pub fn approached(&self) -> bool {
        self.min_dist < APPROACH_FACTOR * self.initial_dist
    }

    /// Approached, stayed, and cycled at least twice.
    pub fn circles_light(&self) -> bool {
        self.approached() && !self.escaped && self.approach_retreat_cycles >= 2
    }

    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        format!(
            "initial_dist = {}\nfinal_dist = {}\nmean_dist = {}\nmedian_dist = {}\nmin_dist = {}\n\
             max_dist = {}\nradius_of_gyration = {}\napproach_retreat_cycles = {}\nescaped = {}\n",
            self.initial_dist,
            self.final_dist,
            self.mean_dist,
            self.median_dist,
            self.min_dist,
            self.max_dist,
            self.radius_of_gyration,
            self.approach_retreat_cycles,
            self.escaped
        )
    }
}

/// Aggregate over the runs of a seed sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub runs: usize,
    pub median_of_medians: f64,
    /// Share of runs with [`TrajectoryMetrics::approached`].
    pub approach_rate: f64,
    pub escape_rate: f64,
    pub mean_cycles: f64,
}

impl SweepSummary {
    pub fn from_runs(runs: &[TrajectoryMetrics]) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::Invalid("sweep has no runs".into()));
        }
        let n = runs.len() as f64;
        let medians: Vec<f64> = runs.iter().map(|m| m.median_dist).collect();
        let rate = |f: fn(&TrajectoryMetrics) -> bool| runs.iter().filter(|m| f(m)).count() as f64 / n;
        Ok(Self {
            runs: runs.len(),
            median_of_medians: median(&medians),
            approach_rate: rate(TrajectoryMetrics::approached),
            escape_rate: rate(|m| m.escaped),
            mean_cycles: runs.iter().map(|m| m.approach_retreat_cycles as f64).sum::<f64>() / n,
        })
    }

    pub fn to_text(&self) -> String {
        format!(
            "runs = {}\nmedian_of_medians = {}\napproach_rate = {}\nescape_rate = {}\nmean_cycles = {}\n",
            self.runs, self.median_of_medians, self.approach_rate, self.escape_rate, self.mean_cycles
        )
    }
}
