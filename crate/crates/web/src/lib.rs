//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws the
//! curves itself. The measurement logic lives in plain functions that take
//! any [`Clock`], so it also runs (and is tested) natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use langbench::algorithms::HybridConfig;
use langbench::harness::{run_experiment, Cell, Clock, ExperimentConfig, Family, Sink, SizeGrid};
use langbench::prng::{self, SplitMix64, VALUE_MIN, VALUE_SPAN};
use langbench::report::{find_crossings, select_best_k, series_from_records, TimingSeries};

#[wasm_bindgen]
extern "C" {
    #[wasm_bindgen(js_namespace = performance, js_name = now)]
    fn performance_now() -> f64;
}

/// `performance.now()`, in nanoseconds. Browsers coarsen this clock, so
/// small inputs need many probes before the means settle.
pub struct PerformanceClock;

impl Clock for PerformanceClock {
    fn now_ns(&self) -> u64 {
        (performance_now() * 1e6) as u64
    }
}

#[derive(Debug, Serialize, PartialEq)]
pub struct PrngPreview {
    pub seed: String,
    pub raw_hex: Vec<String>,
    pub values: Vec<f64>,
    pub histogram: Vec<u64>,
    pub checksum_hex: String,
}

#[derive(Debug, Serialize)]
pub struct Line {
    pub label: String,
    pub means: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct CrossoverResult {
    pub sizes: Vec<usize>,
    pub lines: Vec<Line>,
    pub crossings: Vec<(usize, usize)>,
}

#[derive(Debug, Serialize)]
pub struct RankRow {
    pub k: usize,
    pub total_ns: f64,
    pub wins: usize,
    pub max_spike_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepResult {
    pub sizes: Vec<usize>,
    pub lines: Vec<Line>,
    pub best_k: usize,
    pub ranking: Vec<RankRow>,
}

fn parse_seed(seed: &str) -> Result<u64, String> {
    let s = seed.trim();
    match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("seed {seed:?}: {e}"))
}

/// The first draws of a seed plus a histogram of `n` values over `bins`
/// equal-width buckets of `[1, 65536)`.
pub fn prng_preview(seed: &str, n: usize, bins: usize) -> Result<PrngPreview, String> {
    let seed = parse_seed(seed)?;
    let bins = bins.clamp(1, 512);
    let mut g = SplitMix64::new(seed);
    let raw_hex = (0..8).map(|_| format!("{:016x}", g.next_u64())).collect();

    let values = SplitMix64::new(seed).make_sort_vector(n);
    let mut histogram = vec![0u64; bins];
    for v in &values {
        let bucket = ((v - VALUE_MIN) / VALUE_SPAN * bins as f64) as usize;
        histogram[bucket.min(bins - 1)] += 1;
    }
    Ok(PrngPreview {
        seed: format!("{seed:#x}"),
        raw_hex,
        checksum_hex: format!("{:016x}", prng::f64_checksum(&values)),
        values: values.into_iter().take(16).collect(),
        histogram,
    })
}

fn lines(
    records: &[langbench::harness::MeasurementRecord],
) -> Result<Vec<(Cell, TimingSeries)>, String> {
    Ok(series_from_records(records)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(k, s)| (k.cell, s))
        .collect())
}

fn to_line(cell: Cell, s: &TimingSeries) -> Line {
    Line {
        label: cell.to_string(),
        means: s.means().collect(),
    }
}

pub fn crossover_sweep<C: Clock>(
    clock: &C,
    grid: &str,
    probes: u64,
    seed: &str,
) -> Result<CrossoverResult, String> {
    let cfg = ExperimentConfig {
        sizes: grid.parse::<SizeGrid>().map_err(|e| e.to_string())?,
        probes,
        seed: parse_seed(seed)?,
        component: "wasm".into(),
        ..ExperimentConfig::new(Family::SortCrossover)
    };
    let records =
        run_experiment(&cfg, clock, &mut Sink::new(), |_| Ok(())).map_err(|e| e.to_string())?;
    let series = lines(&records)?;
    let find = |cell| {
        series
            .iter()
            .find(|(c, _)| *c == cell)
            .map(|(_, s)| s)
            .expect("cell run")
    };
    let crossings = find_crossings(find(Cell::InsertionSort), find(Cell::MergeSort))
        .map_err(|e| e.to_string())?
        .crossings;
    Ok(CrossoverResult {
        sizes: cfg.sizes.sizes().to_vec(),
        lines: series.iter().map(|(c, s)| to_line(*c, s)).collect(),
        crossings,
    })
}

pub fn hybrid_sweep<C: Clock>(
    clock: &C,
    grid: &str,
    probes: u64,
    seed: &str,
    thresholds: &str,
) -> Result<SweepResult, String> {
    let thresholds = thresholds
        .split(',')
        .map(|k| {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|e| format!("threshold {k:?}: {e}"))?;
            HybridConfig::new(k).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    let cfg = ExperimentConfig {
        sizes: grid.parse::<SizeGrid>().map_err(|e| e.to_string())?,
        probes,
        seed: parse_seed(seed)?,
        thresholds,
        component: "wasm".into(),
        ..ExperimentConfig::new(Family::HybridSweep)
    };
    let records =
        run_experiment(&cfg, clock, &mut Sink::new(), |_| Ok(())).map_err(|e| e.to_string())?;
    let series = lines(&records)?;
    let by_k: Vec<(usize, TimingSeries)> = series
        .iter()
        .filter_map(|(c, s)| c.threshold_k().map(|k| (k, s.clone())))
        .collect();
    let best = select_best_k(&by_k).map_err(|e| e.to_string())?;
    Ok(SweepResult {
        sizes: cfg.sizes.sizes().to_vec(),
        lines: series.iter().map(|(c, s)| to_line(*c, s)).collect(),
        best_k: best.best,
        ranking: best
            .ranking
            .into_iter()
            .map(|r| RankRow {
                k: r.k,
                total_ns: r.total_ns,
                wins: r.wins,
                max_spike_ratio: r.max_spike_ratio,
            })
            .collect(),
    })
}

fn to_json<T: Serialize>(result: Result<T, String>) -> Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = prngPreview)]
pub fn prng_preview_js(seed: &str, n: usize, bins: usize) -> Result<String, JsError> {
    to_json(prng_preview(seed, n, bins))
}

#[wasm_bindgen(js_name = crossoverSweep)]
pub fn crossover_sweep_js(grid: &str, probes: u32, seed: &str) -> Result<String, JsError> {
    to_json(crossover_sweep(
        &PerformanceClock,
        grid,
        probes.into(),
        seed,
    ))
}

#[wasm_bindgen(js_name = hybridSweep)]
pub fn hybrid_sweep_js(
    grid: &str,
    probes: u32,
    seed: &str,
    thresholds: &str,
) -> Result<String, JsError> {
    to_json(hybrid_sweep(
        &PerformanceClock,
        grid,
        probes.into(),
        seed,
        thresholds,
    ))
}
