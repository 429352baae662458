//! Experiment sweeps: batches of (cell, instance, run) solver executions
//! with per-cell aggregates, plus the per-step decay and median-step
//! datasets for strict-complete runs.
//!
//! Runs execute in a worker pool and are merged into canonically ordered
//! rows (cell, instance, run), so output is independent of scheduling. Every
//! run's seed derives from `(base_seed, cell, instance, run)`, making any
//! row reproducible in isolation.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use stablematch::generate::{gen_smti, gen_sm_ic, GenParams};
use stablematch::model::Instance;
use stablematch::rng::splitmix64;
use stablematch::search::{run_search, SearchParams, SearchResult, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub n: usize,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variant: Variant,
    pub sizes: Vec<usize>,
    /// Ties-and-incomplete sweeps only; leave empty for strict-complete.
    pub p1_grid: Vec<f64>,
    pub p2_grid: Vec<f64>,
    pub instances_per_cell: usize,
    pub runs_per_instance: usize,
    pub base_seed: u64,
    pub p_walk: f64,
    pub max_steps: usize,
    pub max_retries: usize,
    /// Worker threads; 0 means one per logical CPU.
    pub jobs: usize,
}

impl SweepSpec {
    pub fn new(variant: Variant, sizes: Vec<usize>, base_seed: u64) -> SweepSpec {
        SweepSpec {
            variant,
            sizes,
            p1_grid: Vec::new(),
            p2_grid: Vec::new(),
            instances_per_cell: 100,
            runs_per_instance: 1,
            base_seed,
            p_walk: 0.20,
            max_steps: 50_000,
            max_retries: 1000,
            jobs: 0,
        }
    }

    /// Empty sizes or grids are allowed and produce an empty dataset.
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.instances_per_cell == 0 || self.runs_per_instance == 0 {
            return Err(SweepError::BadSpec("counts must be positive".into()));
        }
        for p in self.p1_grid.iter().chain(&self.p2_grid) {
            if !(0.0..=1.0).contains(p) {
                return Err(SweepError::BadSpec(format!("grid value {p} outside [0, 1]")));
            }
        }
        if self.variant != Variant::Ltiu && (!self.p1_grid.is_empty() || !self.p2_grid.is_empty())
        {
            return Err(SweepError::BadSpec(
                "strict-complete sweeps take no p1/p2 grids".into(),
            ));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<Cell> {
        if self.variant == Variant::Ltiu {
            let mut cells = Vec::new();
            for &n in &self.sizes {
                for &p1 in &self.p1_grid {
                    for &p2 in &self.p2_grid {
                        cells.push(Cell {
                            n,
                            p1: Some(p1),
                            p2: Some(p2),
                        });
                    }
                }
            }
            cells
        } else {
            self.sizes
                .iter()
                .map(|&n| Cell {
                    n,
                    p1: None,
                    p2: None,
                })
                .collect()
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep spec: {0}")]
    BadSpec(String),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// One solver execution.
#[derive(Clone, Debug, Serialize)]
pub struct RunRow {
    pub cell: Cell,
    pub instance_idx: usize,
    pub run_idx: usize,
    pub seed: u64,
    pub found_stable: bool,
    pub found_perfect: bool,
    pub steps: usize,
    pub restarts: usize,
    pub best_size: usize,
    pub best_singles: usize,
    pub best_nbp: usize,
    pub best_ns: usize,
    pub best_f: usize,
    pub wall_ms: f64,
}

/// Per-cell aggregate; a generator failure leaves the statistics empty and
/// the error recorded.
#[derive(Clone, Debug, Serialize)]
pub struct CellRow {
    pub cell: Cell,
    pub instances: usize,
    pub runs: usize,
    pub mean_size: f64,
    pub mean_singles: f64,
    pub pct_perfect: f64,
    pub pct_stable: f64,
    pub mean_steps: f64,
    pub median_steps: f64,
    pub mean_wall_ms: f64,
    pub error: Option<String>,
}

/// Mean blocking pairs across a size's runs after `t` steps (strict-complete
/// sweeps only). Runs that have already stopped contribute their final
/// count.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub t: usize,
    pub mean_nbp: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub runs: Vec<RunRow>,
    pub cells: Vec<CellRow>,
    pub decay: Vec<DecayRow>,
    /// `(n, median steps)` per size (strict-complete sweeps only).
    pub medians: Vec<(usize, f64)>,
}

/// Mixes salts into a base seed; one splitmix step per component.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    let mut state = base;
    let mut out = splitmix64(&mut state);
    for &s in salts {
        state = out ^ s.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        out = splitmix64(&mut state);
    }
    out
}

/// Instance for `(spec, cell, instance_idx)`.
pub fn cell_instance(
    spec: &SweepSpec,
    cell_idx: usize,
    cell: Cell,
    instance_idx: usize,
) -> Result<Instance, String> {
    let seed = derive_seed(spec.base_seed, &[cell_idx as u64, instance_idx as u64, 0]);
    match (cell.p1, cell.p2) {
        (Some(p1), Some(p2)) => {
            let mut params =
                GenParams::new(cell.n, p1, p2, seed).map_err(|e| e.to_string())?;
            params.max_retries = spec.max_retries;
            gen_smti(&params).map_err(|e| e.to_string())
        }
        _ => Ok(gen_sm_ic(cell.n, seed)),
    }
}

fn search_params(spec: &SweepSpec, seed: u64) -> SearchParams {
    let mut params = SearchParams::new(spec.variant, seed);
    params.p_walk = spec.p_walk;
    params.max_steps = spec.max_steps;
    params
}

struct RunOutput {
    row: RunRow,
    /// Blocking-pair counts per step, starting at t = 0, for decay curves.
    nbp_series: Option<Vec<usize>>,
}

/// Executes the whole sweep. `collect_decay` additionally accumulates the
/// per-step blocking-pair curves (meaningful for strict-complete variants).
pub fn run_sweep(spec: &SweepSpec, collect_decay: bool) -> Result<SweepOutcome, SweepError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()?;

    let cells = spec.cells();
    struct CellData {
        cell: Cell,
        runs: Vec<RunOutput>,
        error: Option<String>,
    }

    let cell_data: Vec<CellData> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(cell_idx, &cell)| {
                // One generator failure marks the whole cell; the sweep
                // itself continues.
                let mut instances = Vec::new();
                for i in 0..spec.instances_per_cell {
                    match cell_instance(spec, cell_idx, cell, i) {
                        Ok(inst) => instances.push(inst),
                        Err(e) => {
                            return CellData {
                                cell,
                                runs: Vec::new(),
                                error: Some(e),
                            }
                        }
                    }
                }
                let runs: Vec<RunOutput> = instances
                    .par_iter()
                    .enumerate()
                    .flat_map(|(i, inst)| {
                        (0..spec.runs_per_instance)
                            .into_par_iter()
                            .map(move |r| (i, r, inst))
                    })
                    .map(|(i, r, inst)| {
                        let seed =
                            derive_seed(spec.base_seed, &[cell_idx as u64, i as u64, 1 + r as u64]);
                        let params = search_params(spec, seed);
                        let started = Instant::now();
                        let result =
                            run_search(inst, &params).expect("spec validated against mode");
                        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
                        make_output(cell, i, r, seed, &result, wall_ms, collect_decay)
                    })
                    .collect();
                CellData {
                    cell,
                    runs,
                    error: None,
                }
            })
            .collect()
    });

    let mut runs = Vec::new();
    let mut cell_rows = Vec::new();
    let mut decay = Vec::new();
    let mut medians = Vec::new();

    if collect_decay {
        // A run's blocking count holds at its final value (zero once stable)
        // past its termination step.
        let mut sizes: Vec<usize> = cell_data.iter().map(|d| d.cell.n).collect();
        sizes.sort_unstable();
        sizes.dedup();
        for n in sizes {
            let series: Vec<&Vec<usize>> = cell_data
                .iter()
                .filter(|d| d.cell.n == n)
                .flat_map(|d| d.runs.iter())
                .map(|r| r.nbp_series.as_ref().expect("collected"))
                .collect();
            if series.is_empty() {
                continue;
            }
            let horizon = series.iter().map(|s| s.len()).max().unwrap();
            for t in 0..horizon {
                let sum: u64 = series
                    .iter()
                    .map(|s| s.get(t).copied().unwrap_or(*s.last().unwrap()) as u64)
                    .sum();
                decay.push(DecayRow {
                    n,
                    t,
                    mean_nbp: sum as f64 / series.len() as f64,
                });
            }
        }
    }

    for data in cell_data {
        let rows: Vec<&RunRow> = data.runs.iter().map(|r| &r.row).collect();
        cell_rows.push(aggregate_cell(data.cell, &rows, data.error.clone()));
        runs.extend(data.runs.into_iter().map(|r| r.row));
    }

    runs.sort_by(|a, b| row_key(a).partial_cmp(&row_key(b)).expect("finite keys"));
    cell_rows.sort_by(|a, b| {
        cell_key(&a.cell)
            .partial_cmp(&cell_key(&b.cell))
            .expect("finite keys")
    });

    if collect_decay {
        for &n in &spec.sizes {
            let mut steps: Vec<usize> = runs
                .iter()
                .filter(|r| r.cell.n == n)
                .map(|r| r.steps)
                .collect();
            if steps.is_empty() {
                continue;
            }
            steps.sort_unstable();
            medians.push((n, median_of_sorted(&steps)));
        }
    }

    Ok(SweepOutcome {
        runs,
        cells: cell_rows,
        decay,
        medians,
    })
}

fn make_output(
    cell: Cell,
    instance_idx: usize,
    run_idx: usize,
    seed: u64,
    result: &SearchResult,
    wall_ms: f64,
    collect_decay: bool,
) -> RunOutput {
    let nbp_series = collect_decay.then(|| {
        let mut series = Vec::with_capacity(result.trace.len() + 1);
        series.push(result.initial_eval.nbp);
        series.extend(result.trace.iter().map(|r| r.nbp));
        series
    });
    RunOutput {
        row: RunRow {
            cell,
            instance_idx,
            run_idx,
            seed,
            found_stable: result.found_stable,
            found_perfect: result.found_perfect,
            steps: result.steps_taken,
            restarts: result.restarts,
            best_size: result.best.size(),
            best_singles: result.best.singles(),
            best_nbp: result.best_eval.nbp,
            best_ns: result.best_eval.ns,
            best_f: result.best_eval.f(),
            wall_ms,
        },
        nbp_series,
    }
}

fn aggregate_cell(cell: Cell, rows: &[&RunRow], error: Option<String>) -> CellRow {
    if rows.is_empty() {
        return CellRow {
            cell,
            instances: 0,
            runs: 0,
            mean_size: 0.0,
            mean_singles: 0.0,
            pct_perfect: 0.0,
            pct_stable: 0.0,
            mean_steps: 0.0,
            median_steps: 0.0,
            mean_wall_ms: 0.0,
            error,
        };
    }
    let count = rows.len() as f64;
    let mut steps: Vec<usize> = rows.iter().map(|r| r.steps).collect();
    steps.sort_unstable();
    let instances = rows
        .iter()
        .map(|r| r.instance_idx)
        .collect::<std::collections::HashSet<_>>()
        .len();
    CellRow {
        cell,
        instances,
        runs: rows.len(),
        mean_size: rows.iter().map(|r| r.best_size as f64).sum::<f64>() / count,
        mean_singles: rows.iter().map(|r| r.best_singles as f64).sum::<f64>() / count,
        pct_perfect: 100.0 * rows.iter().filter(|r| r.found_perfect).count() as f64 / count,
        pct_stable: 100.0 * rows.iter().filter(|r| r.found_stable).count() as f64 / count,
        mean_steps: rows.iter().map(|r| r.steps as f64).sum::<f64>() / count,
        median_steps: median_of_sorted(&steps),
        mean_wall_ms: rows.iter().map(|r| r.wall_ms).sum::<f64>() / count,
        error,
    }
}

fn median_of_sorted(sorted: &[usize]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2] as f64
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) as f64 / 2.0
    }
}

fn row_key(r: &RunRow) -> (usize, f64, f64, usize, usize) {
    (
        r.cell.n,
        r.cell.p1.unwrap_or(-1.0),
        r.cell.p2.unwrap_or(-1.0),
        r.instance_idx,
        r.run_idx,
    )
}

fn cell_key(c: &Cell) -> (usize, f64, f64) {
    (c.n, c.p1.unwrap_or(-1.0), c.p2.unwrap_or(-1.0))
}
