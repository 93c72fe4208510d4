//! Probe orchestration and timing.
//!
//! A cell is one (algorithm, parameter) pair measured at one size. Each probe
//! regenerates its input from a seed derived from `(seed, family, size,
//! probe)`, so any cell can be reproduced on its own, and every algorithm in
//! a family sees the same inputs at a given size and probe index. Only the
//! operation under test runs between the two clock reads.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use crate::algorithms::{self, HybridConfig, DEFAULT_THRESHOLDS};
use crate::dict_workload::{self, AdsKind};
use crate::error::{Error, Result};
use crate::prng::{self, SplitMix64, GAMMA};

pub const DEFAULT_PROBES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    SortCrossover,
    HybridSweep,
    DictOps,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::SortCrossover, Family::HybridSweep, Family::DictOps];

    pub fn label(self) -> &'static str {
        match self {
            Family::SortCrossover => "sort-crossover",
            Family::HybridSweep => "hybrid-sweep",
            Family::DictOps => "dict-ops",
        }
    }

    /// Word used for this family when deriving probe seeds.
    pub fn code(self) -> u64 {
        match self {
            Family::SortCrossover => 1,
            Family::HybridSweep => 2,
            Family::DictOps => 3,
        }
    }

    pub fn default_grid(self) -> SizeGrid {
        match self {
            Family::SortCrossover => SizeGrid::stepped(25, 1000, 25),
            Family::HybridSweep => SizeGrid::stepped(250, 10_000, 250),
            Family::DictOps => SizeGrid::stepped(100, 10_000, 100),
        }
        .expect("default grids are valid")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operation {
    Insert,
    Delete,
}

impl Operation {
    pub fn label(self) -> &'static str {
        match self {
            Operation::Insert => "insert",
            Operation::Delete => "delete",
        }
    }
}

impl FromStr for Operation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "insert" => Ok(Operation::Insert),
            "delete" => Ok(Operation::Delete),
            other => Err(format!("unknown operation {other:?}")),
        }
    }
}

/// What a single measurement runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    InsertionSort,
    MergeSort,
    HybridSort(HybridConfig),
    Dict(AdsKind, Operation),
}

impl Cell {
    pub fn algorithm(self) -> &'static str {
        match self {
            Cell::InsertionSort => "insertion_sort",
            Cell::MergeSort => "merge_sort",
            Cell::HybridSort(_) => "hybrid_sort",
            Cell::Dict(ads, _) => ads.label(),
        }
    }

    pub fn threshold_k(self) -> Option<usize> {
        match self {
            Cell::HybridSort(cfg) => Some(cfg.threshold()),
            _ => None,
        }
    }

    pub fn operation(self) -> Option<Operation> {
        match self {
            Cell::Dict(_, op) => Some(op),
            _ => None,
        }
    }

    /// Rebuilds a cell from its CSV columns.
    pub fn from_parts(
        algorithm: &str,
        threshold_k: Option<usize>,
        operation: Option<Operation>,
    ) -> Result<Self, String> {
        let cell = match (algorithm, threshold_k, operation) {
            ("insertion_sort", None, None) => Cell::InsertionSort,
            ("merge_sort", None, None) => Cell::MergeSort,
            ("hybrid_sort", Some(k), None) => {
                Cell::HybridSort(HybridConfig::new(k).map_err(|e| e.to_string())?)
            }
            ("hybrid_sort", None, _) => return Err("hybrid_sort requires threshold_k".into()),
            (ads, None, Some(op)) if ads.parse::<AdsKind>().is_ok() => {
                Cell::Dict(ads.parse().expect("checked"), op)
            }
            (alg, _, _) => {
                return Err(format!(
                    "inconsistent algorithm/threshold_k/operation for {alg:?}"
                ))
            }
        };
        Ok(cell)
    }

    pub fn belongs_to(self, family: Family) -> bool {
        match family {
            Family::SortCrossover => matches!(self, Cell::InsertionSort | Cell::MergeSort),
            Family::HybridSweep => !matches!(self, Cell::Dict(..)),
            Family::DictOps => matches!(self, Cell::Dict(..)),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.algorithm())?;
        if let Some(k) = self.threshold_k() {
            write!(f, "@{k}")?;
        }
        if let Some(op) = self.operation() {
            write!(f, "/{}", op.label())?;
        }
        Ok(())
    }
}

/// A strictly increasing list of positive sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeGrid(Vec<usize>);

impl SizeGrid {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Config("size grid is empty".into()));
        }
        if sizes[0] == 0 {
            return Err(Error::Config("sizes must be positive".into()));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sizes must be strictly increasing".into()));
        }
        Ok(Self(sizes))
    }

    /// `lo, lo+step, ...` up to and including `hi` when it lies on the grid.
    pub fn stepped(lo: usize, hi: usize, step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::Config("grid step must be positive".into()));
        }
        if lo > hi {
            return Err(Error::Config(format!("grid start {lo} exceeds end {hi}")));
        }
        Self::new((lo..=hi).step_by(step).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for SizeGrid {
    type Err = Error;

    /// Parses `lo:hi:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(Error::Config(format!("grid {s:?} is not lo:hi:step")));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("grid {s:?}: {x:?}: {e}")))
        };
        Self::stepped(num(lo)?, num(hi)?, num(step)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub sizes: SizeGrid,
    pub probes: u64,
    /// Untimed probes run before each cell. Zero reproduces plain means.
    pub warmup: u64,
    pub seed: u64,
    /// Only used by the hybrid sweep.
    pub thresholds: Vec<HybridConfig>,
    pub component: String,
}

impl ExperimentConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            sizes: family.default_grid(),
            probes: DEFAULT_PROBES,
            warmup: 0,
            seed: 0,
            thresholds: DEFAULT_THRESHOLDS
                .iter()
                .map(|&k| HybridConfig::new(k).expect("nonzero"))
                .collect(),
            component: "rust".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.probes == 0 {
            return Err(Error::Config("probes must be at least 1".into()));
        }
        if self.family == Family::HybridSweep && self.thresholds.is_empty() {
            return Err(Error::Config(
                "hybrid sweep needs at least one threshold".into(),
            ));
        }
        if self.component.is_empty() || self.component.contains([',', '\n', '\r']) {
            return Err(Error::Config(format!(
                "component label {:?} must be nonempty and free of commas and newlines",
                self.component
            )));
        }
        Ok(())
    }

    /// Cells in the order they are run at each size.
    pub fn cells(&self) -> Vec<Cell> {
        match self.family {
            Family::SortCrossover => vec![Cell::InsertionSort, Cell::MergeSort],
            Family::HybridSweep => {
                let mut cells: Vec<Cell> = self
                    .thresholds
                    .iter()
                    .map(|&k| Cell::HybridSort(k))
                    .collect();
                cells.push(Cell::MergeSort);
                cells.push(Cell::InsertionSort);
                cells
            }
            Family::DictOps => AdsKind::ALL
                .into_iter()
                .flat_map(|ads| {
                    [Operation::Insert, Operation::Delete].map(|op| Cell::Dict(ads, op))
                })
                .collect(),
        }
    }

    pub fn record_count(&self) -> usize {
        self.sizes.len() * self.cells().len()
    }
}

/// Arithmetic mean in nanoseconds, held as an exact count of thousandths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MeanNs(u64);

impl MeanNs {
    pub fn from_millis(millis: u64) -> Self {
        Self(millis)
    }

    /// `total / count`, rounded half-to-even at the third decimal.
    pub fn from_total(total_ns: u128, count: u64) -> Self {
        assert!(count > 0, "mean over zero probes");
        let num = total_ns * 1000;
        let den = u128::from(count);
        let (q, r) = (num / den, num % den);
        let q = match (2 * r).cmp(&den) {
            std::cmp::Ordering::Less => q,
            std::cmp::Ordering::Greater => q + 1,
            std::cmp::Ordering::Equal => q + (q & 1),
        };
        Self(u64::try_from(q).unwrap_or(u64::MAX))
    }

    pub fn millis(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl fmt::Display for MeanNs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

impl FromStr for MeanNs {
    type Err = String;

    /// Accepts exactly three fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("mean_ns {s:?} is not a decimal with three fractional digits");
        let (int, frac) = s.split_once('.').ok_or_else(bad)?;
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
        if !digits(int) || frac.len() != 3 || !digits(frac) {
            return Err(bad());
        }
        let int: u64 = int.parse().map_err(|_| bad())?;
        let frac: u64 = frac.parse().map_err(|_| bad())?;
        int.checked_mul(1000)
            .and_then(|x| x.checked_add(frac))
            .map(MeanNs)
            .ok_or_else(bad)
    }
}

/// One measured cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub family: Family,
    pub component: String,
    pub cell: Cell,
    pub size: usize,
    pub probes: u64,
    pub mean_ns: MeanNs,
}

/// Source of monotonic nanosecond timestamps.
pub trait Clock {
    fn now_ns(&self) -> u64;
}

/// `std::time::Instant`, measured from construction.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    #[inline]
    fn now_ns(&self) -> u64 {
        u64::try_from(self.origin.elapsed().as_nanos()).unwrap_or(u64::MAX)
    }
}

/// Accumulates one value from each probe's output so the optimizer cannot
/// discard the timed work. Report [`Sink::checksum`] at the end of a run.
#[derive(Debug, Default)]
pub struct Sink {
    acc: u64,
    count: u64,
}

impl Sink {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn consume(&mut self, value: u64) {
        self.acc = black_box(self.acc.rotate_left(5) ^ value);
        self.count += 1;
    }

    pub fn checksum(&self) -> u64 {
        self.acc
    }

    pub fn consumed(&self) -> u64 {
        self.count
    }
}

/// Runs `op` between two clock reads and returns the elapsed nanoseconds
/// together with the operation's output.
#[inline]
pub fn time_probe<C: Clock + ?Sized, O>(clock: &C, op: impl FnOnce() -> O) -> Result<(u64, O)> {
    let start = clock.now_ns();
    let out = black_box(op());
    let end = clock.now_ns();
    let elapsed = end.checked_sub(start).ok_or(Error::ClockWentBackwards {
        start_ns: start,
        end_ns: end,
    })?;
    Ok((elapsed, out))
}

/// Seed of the generator for one probe: `seed` XOR a SplitMix64 fold of
/// `(family code, size, probe)`.
pub fn probe_seed(seed: u64, family: Family, size: usize, probe: u64) -> u64 {
    let acc = [family.code(), size as u64, probe]
        .into_iter()
        .fold(0u64, |acc, word| {
            prng::mix64((acc ^ word).wrapping_add(GAMMA))
        });
    seed ^ acc
}

/// XOR checksum of the input a probe would receive: the value bits for
/// the sort families, the key stream for the dictionary family.
pub fn probe_input_checksum(seed: u64, family: Family, size: usize, probe: u64) -> u64 {
    let mut g = SplitMix64::new(probe_seed(seed, family, size, probe));
    match family {
        Family::SortCrossover | Family::HybridSweep => {
            prng::f64_checksum(&g.make_sort_vector(size))
        }
        Family::DictOps => prng::u64_checksum(g.make_kv_workload(size).keys()),
    }
}

/// Generates the input for one probe, times the operation, and feeds the
/// sink. Returns the elapsed nanoseconds.
pub fn run_probe<C: Clock + ?Sized>(
    clock: &C,
    sink: &mut Sink,
    cell: Cell,
    size: usize,
    seed: u64,
) -> Result<u64> {
    let mut g = SplitMix64::new(seed);
    let elapsed = match cell {
        Cell::Dict(ads, op) => {
            let w = g.make_kv_workload(size);
            match op {
                Operation::Insert => {
                    let (ns, d) = time_probe(clock, || dict_workload::insert_all(ads, &w))?;
                    sink.consume(d.len() as u64);
                    ns
                }
                Operation::Delete => {
                    let mut d = dict_workload::insert_all(ads, &w);
                    let (ns, stats) = time_probe(clock, || dict_workload::delete_all(&mut d, &w))?;
                    sink.consume((stats.removed + d.len()) as u64);
                    ns
                }
            }
        }
        sort => {
            let mut v = black_box(g.make_sort_vector(size));
            let (ns, ()) = time_probe(clock, || match sort {
                Cell::InsertionSort => algorithms::insertion_sort(&mut v),
                Cell::MergeSort => algorithms::merge_sort(&mut v),
                Cell::HybridSort(cfg) => algorithms::hybrid_sort(&mut v, cfg),
                Cell::Dict(..) => unreachable!(),
            })?;
            sink.consume(v.get(v.len() / 2).map_or(0, |x| x.to_bits()));
            ns
        }
    };
    Ok(elapsed)
}

/// Measures one cell at one size over `cfg.probes` probes.
pub fn run_cell<C: Clock + ?Sized>(
    cfg: &ExperimentConfig,
    clock: &C,
    sink: &mut Sink,
    cell: Cell,
    size: usize,
) -> Result<MeasurementRecord> {
    cfg.validate()?;
    if !cell.belongs_to(cfg.family) {
        return Err(Error::Config(format!(
            "cell {cell} is not part of the {} family",
            cfg.family
        )));
    }
    for probe in 1..=cfg.warmup {
        let seed = probe_seed(cfg.seed, cfg.family, size, probe);
        run_probe(clock, sink, cell, size, seed)?;
    }
    let mut total: u128 = 0;
    for probe in 1..=cfg.probes {
        let seed = probe_seed(cfg.seed, cfg.family, size, probe);
        total += u128::from(run_probe(clock, sink, cell, size, seed)?);
    }
    Ok(MeasurementRecord {
        family: cfg.family,
        component: cfg.component.clone(),
        cell,
        size,
        probes: cfg.probes,
        mean_ns: MeanNs::from_total(total, cfg.probes),
    })
}

/// Runs the whole grid, size by size, handing each record to `on_record`
/// as soon as it is measured.
pub fn run_experiment<C, F>(
    cfg: &ExperimentConfig,
    clock: &C,
    sink: &mut Sink,
    mut on_record: F,
) -> Result<Vec<MeasurementRecord>>
where
    C: Clock + ?Sized,
    F: FnMut(&MeasurementRecord) -> Result<()>,
{
    cfg.validate()?;
    let cells = cfg.cells();
    let mut records = Vec::with_capacity(cfg.record_count());
    for &size in cfg.sizes.sizes() {
        for &cell in &cells {
            let record = run_cell(cfg, clock, sink, cell, size)?;
            on_record(&record)?;
            records.push(record);
        }
    }
    Ok(records)
}
