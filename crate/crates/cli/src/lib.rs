//! Library side of the `mqc` command-line tool.

pub mod config;
pub mod engine;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use serde::Serialize;

use config::{Point, RunConfig, SweepParam};
use engine::PointRecord;
use output::{echo_table, emit, spectra_table, summary_table, Stamp};

#[derive(Debug, Clone, Serialize)]
pub struct Coord {
    pub parameter: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointEntry {
    pub index: usize,
    pub coords: Vec<Coord>,
    pub record: PointRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointError {
    pub index: usize,
    pub coords: Vec<Coord>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub config: RunConfig,
    pub points: Vec<PointEntry>,
    pub errors: Vec<PointError>,
}

pub struct RunOutcome {
    pub points: Vec<Point>,
    pub results: Vec<Result<PointRecord, String>>,
}

fn coords(point: &Point) -> Vec<Coord> {
    point.coords.iter().map(|&(p, v)| Coord { parameter: p.name(), value: v }).collect()
}

/// Evaluates every point on a pool of `workers` threads; order follows the sweep.
pub fn run(cfg: &RunConfig, workers: usize) -> anyhow::Result<RunOutcome> {
    let points = cfg.points()?;
    let entropies = cfg.entropies;
    let results = mqc_core::parallel::with_workers(workers, || {
        mqc_core::parallel::map(&points, |p| engine::evaluate(p, entropies).map_err(|e| format!("{e:#}")))
    });
    Ok(RunOutcome { points, results })
}

impl RunOutcome {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.is_err()).count()
    }

    pub fn report(&self, cfg: &RunConfig) -> RunReport {
        let mut points = Vec::new();
        let mut errors = Vec::new();
        for (index, (p, r)) in self.points.iter().zip(&self.results).enumerate() {
            match r {
                Ok(record) => points.push(PointEntry { index, coords: coords(p), record: record.clone() }),
                Err(message) => errors.push(PointError { index, coords: coords(p), message: message.clone() }),
            }
        }
        RunReport { stamp: Stamp::new(cfg.hash()), config: cfg.clone(), points, errors }
    }

    /// Writes `summary`, `spectra`, `echo` tables and the `report` document into `dir`.
    pub fn write(&self, cfg: &RunConfig, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
        output::prepare_dir(dir).map_err(|e| anyhow::anyhow!("outputs.dir {}: {e}", dir.display()))?;
        let swept: Vec<SweepParam> = cfg.sweep.iter().map(|s| s.parameter).collect();
        let ok: Vec<(&[(SweepParam, f64)], &PointRecord)> = self
            .points
            .iter()
            .zip(&self.results)
            .filter_map(|(p, r)| r.as_ref().ok().map(|r| (p.coords.as_slice(), r)))
            .collect();
        let stamp = Stamp::new(cfg.hash());
        let summary = summary_table(&swept, &ok, cfg.entropies);
        let spectra = spectra_table(&swept, &ok);
        let echo = echo_table(&swept, &ok);
        let report = self.report(cfg);
        Ok(emit(
            dir,
            &cfg.outputs.formats,
            &stamp,
            &[("summary", &summary), ("spectra", &spectra), ("echo", &echo)],
            Some(("report", &report)),
        )?)
    }
}

/// Worker count: explicit flag, then `MQC_WORKERS`, then available parallelism.
pub fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("MQC_WORKERS").ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
