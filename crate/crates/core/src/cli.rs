//! `langbench run | analyze | verify`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algorithms::HybridConfig;
use crate::error::{Error, Result};
use crate::harness::{
    self, Cell, ExperimentConfig, Family, MeasurementRecord, MonotonicClock, Sink, SizeGrid,
};
use crate::report::{self, RecordWriter, SeriesKey, TimingSeries, Winner};
use crate::verify;

#[derive(Debug, Parser)]
#[command(
    name = "langbench",
    version,
    about = "Sorting and dictionary micro-benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment family and write its measurements.
    Run(RunArgs),
    /// Analyse result files.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Check the generator and input checksums against the golden fixtures.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// sort-crossover, hybrid-sweep or dict-ops.
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Size grid as lo:hi:step; defaults to the family's grid.
    #[arg(long, value_parser = parse_grid)]
    pub sizes: Option<SizeGrid>,
    #[arg(long, default_value_t = harness::DEFAULT_PROBES)]
    pub probes: u64,
    /// Untimed probes before each cell.
    #[arg(long, default_value_t = 0)]
    pub warmup: u64,
    /// Decimal or 0x-prefixed hexadecimal.
    #[arg(long, default_value = "0", value_parser = parse_u64)]
    pub seed: u64,
    /// Hybrid thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<usize>>,
    /// Output CSV; defaults to <family>.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write plot tables into this directory.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    #[arg(long, default_value = "rust")]
    pub component_label: String,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Grid intervals where two series swap order.
    Crossover(PairArgs),
    /// Rank hybrid thresholds in a sweep.
    BestK(BestKArgs),
    /// Per-size ratio table between two series.
    Compare(PairArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Series in A, e.g. `merge_sort`, `hybrid_sort@16`, `hash_map/insert`
    /// or `rust/merge_sort`.
    #[arg(long)]
    pub a_series: Option<String>,
    #[arg(long)]
    pub b_series: Option<String>,
    /// Optional CSV with the per-size table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BestKArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Restrict to one component label.
    #[arg(long)]
    pub component: Option<String>,
    /// Optional CSV with the ranking.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "fixtures")]
    pub fixtures: PathBuf,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse()
}

fn parse_grid(s: &str) -> std::result::Result<SizeGrid, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("{s:?}: {e}"))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Run(args) => run(args, out, err),
        Command::Analyze(AnalyzeCommand::Crossover(args)) => crossover(args, out),
        Command::Analyze(AnalyzeCommand::BestK(args)) => best_k(args, out),
        Command::Analyze(AnalyzeCommand::Compare(args)) => compare(args, out),
        Command::Verify(args) => verify(args, out),
    }
}

fn stdout_io(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub fn config_from_args(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(args.family);
    if let Some(sizes) = &args.sizes {
        cfg.sizes = sizes.clone();
    }
    if let Some(ks) = &args.thresholds {
        if args.family != Family::HybridSweep {
            return Err(Error::Config(
                "--thresholds only applies to hybrid-sweep".into(),
            ));
        }
        cfg.thresholds = ks
            .iter()
            .map(|&k| HybridConfig::new(k))
            .collect::<Result<_>>()?;
    }
    cfg.probes = args.probes;
    cfg.warmup = args.warmup;
    cfg.seed = args.seed;
    cfg.component = args.component_label.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = config_from_args(&args)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.family)));
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut writer = RecordWriter::new(BufWriter::new(file)).map_err(|e| Error::io(&path, e))?;

    let total = cfg.record_count();
    let clock = MonotonicClock::new();
    let mut sink = Sink::new();
    let mut done = 0;
    let records = harness::run_experiment(&cfg, &clock, &mut sink, |r| {
        writer.write(r).map_err(|e| Error::io(&path, e))?;
        done += 1;
        let _ = writeln!(
            err,
            "[{done}/{total}] {} n={} mean={} ns",
            r.cell, r.size, r.mean_ns
        );
        Ok(())
    })?;
    writeln!(out, "wrote {} records to {}", records.len(), path.display()).map_err(stdout_io)?;

    if let Some(dir) = &args.plot_dir {
        let written = report::emit_plot_data(&records, dir)?;
        writeln!(
            out,
            "wrote {} plot tables to {}",
            written.len(),
            dir.display()
        )
        .map_err(stdout_io)?;
    }
    summarize_run(&records, out)?;
    let _ = writeln!(
        err,
        "sink checksum {:016x} over {} probes",
        sink.checksum(),
        sink.consumed()
    );
    Ok(0)
}

fn summarize_run(records: &[MeasurementRecord], out: &mut dyn Write) -> Result<()> {
    let series = report::series_from_records(records)?;
    let find = |cell: Cell| series.iter().find(|(k, _)| k.cell == cell).map(|(_, s)| s);
    if let (Some(ins), Some(merge)) = (find(Cell::InsertionSort), find(Cell::MergeSort)) {
        let crossings = report::find_crossings(ins, merge)?;
        writeln!(out, "insertion_sort vs merge_sort: {crossings}").map_err(stdout_io)?;
    }
    let by_k = hybrid_series(&series, None);
    if !by_k.is_empty() {
        let best = report::select_best_k(&by_k)?;
        writeln!(out, "best hybrid threshold: K={}", best.best).map_err(stdout_io)?;
    }
    Ok(())
}

fn hybrid_series(
    series: &[(SeriesKey, TimingSeries)],
    component: Option<&str>,
) -> Vec<(usize, TimingSeries)> {
    series
        .iter()
        .filter(|(k, _)| component.is_none_or(|c| k.component == c))
        .filter_map(|(k, s)| k.cell.threshold_k().map(|t| (t, s.clone())))
        .collect()
}

fn matches_selector(key: &SeriesKey, selector: &str) -> bool {
    selector == key.to_string() || selector == key.cell.to_string()
}

/// Picks one series from a file: by selector, or the only series, or the
/// fallback cell if present.
fn pick_series(
    path: &Path,
    series: &[(SeriesKey, TimingSeries)],
    selector: Option<&str>,
    fallback: Option<Cell>,
) -> Result<(SeriesKey, TimingSeries)> {
    let available = || {
        series
            .iter()
            .map(|(k, _)| k.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let hits: Vec<_> = match selector {
        Some(sel) => series
            .iter()
            .filter(|(k, _)| matches_selector(k, sel))
            .collect(),
        None if series.len() == 1 => series.iter().collect(),
        None => match fallback {
            Some(cell) => series.iter().filter(|(k, _)| k.cell == cell).collect(),
            None => Vec::new(),
        },
    };
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(Error::Config(format!(
            "{}: no series selected (available: {})",
            path.display(),
            available()
        ))),
        _ => Err(Error::Config(format!(
            "{}: selector matches several series (available: {})",
            path.display(),
            available()
        ))),
    }
}

fn load_series(path: &Path) -> Result<Vec<(SeriesKey, TimingSeries)>> {
    let records = report::read_csv(path)?;
    if records.is_empty() {
        return Err(Error::Config(format!("{}: no records", path.display())));
    }
    report::series_from_records(&records)
}

fn crossover(args: PairArgs, out: &mut dyn Write) -> Result<i32> {
    let a_all = load_series(&args.a)?;
    let b_all = load_series(&args.b)?;
    let (ak, a) = pick_series(
        &args.a,
        &a_all,
        args.a_series.as_deref(),
        Some(Cell::InsertionSort),
    )?;
    let (bk, b) = pick_series(
        &args.b,
        &b_all,
        args.b_series.as_deref(),
        Some(Cell::MergeSort),
    )?;
    let report = report::find_crossings(&a, &b)?;
    writeln!(
        out,
        "crossings of {ak} and {bk}: {}",
        report.crossings.len()
    )
    .map_err(stdout_io)?;
    for (lo, hi) in &report.crossings {
        writeln!(out, "{lo} {hi}").map_err(stdout_io)?;
    }
    if let Some(path) = &args.out {
        let mut text = String::from("size_lo,size_hi\n");
        for (lo, hi) in &report.crossings {
            text.push_str(&format!("{lo},{hi}\n"));
        }
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(0)
}

fn best_k(args: BestKArgs, out: &mut dyn Write) -> Result<i32> {
    let series = load_series(&args.input)?;
    let mut components: Vec<&str> = series.iter().map(|(k, _)| k.component.as_str()).collect();
    components.dedup();
    if let Some(c) = &args.component {
        components.retain(|x| x == c);
    }
    let mut table = String::from("component,rank,threshold_k,total_ns,wins,max_spike_ratio\n");
    let mut any = false;
    for component in components {
        let by_k = hybrid_series(&series, Some(component));
        if by_k.is_empty() {
            continue;
        }
        any = true;
        let best = report::select_best_k(&by_k)?;
        let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(stdout_io);
        w(out, format!("{component}: best K={}", best.best))?;
        w(out, "rank k total_ns wins max_spike_ratio".into())?;
        for (rank, s) in best.ranking.iter().enumerate() {
            w(
                out,
                format!(
                    "{} {} {:.3} {} {:.4}",
                    rank + 1,
                    s.k,
                    s.total_ns,
                    s.wins,
                    s.max_spike_ratio
                ),
            )?;
            table.push_str(&format!(
                "{component},{},{},{:.3},{},{:.4}\n",
                rank + 1,
                s.k,
                s.total_ns,
                s.wins,
                s.max_spike_ratio
            ));
        }
        let best_total = best.ranking[0].total_ns;
        for cell in [Cell::MergeSort, Cell::InsertionSort] {
            if let Some((_, s)) = series.iter().find(|(k, s)| {
                k.component == component && k.cell == cell && s.sizes().eq(by_k[0].1.sizes())
            }) {
                w(
                    out,
                    format!(
                        "hybrid K={} total / {} total = {:.4}",
                        best.best,
                        cell.algorithm(),
                        best_total / s.total()
                    ),
                )?;
            }
        }
    }
    if !any {
        return Err(Error::Config(format!(
            "{}: no hybrid_sort series",
            args.input.display()
        )));
    }
    if let Some(path) = &args.out {
        std::fs::write(path, table).map_err(|e| Error::io(path, e))?;
    }
    Ok(0)
}

fn compare(args: PairArgs, out: &mut dyn Write) -> Result<i32> {
    let a_all = load_series(&args.a)?;
    let b_all = load_series(&args.b)?;

    let pairs: Vec<((SeriesKey, TimingSeries), (SeriesKey, TimingSeries))> =
        if args.a_series.is_some()
            || args.b_series.is_some()
            || (a_all.len() == 1 && b_all.len() == 1)
        {
            vec![(
                pick_series(&args.a, &a_all, args.a_series.as_deref(), None)?,
                pick_series(&args.b, &b_all, args.b_series.as_deref(), None)?,
            )]
        } else {
            // Pair up series measuring the same thing in both files.
            a_all
                .iter()
                .filter_map(|(ak, a)| {
                    b_all
                        .iter()
                        .find(|(bk, _)| bk.family == ak.family && bk.cell == ak.cell)
                        .map(|b| ((ak.clone(), a.clone()), b.clone()))
                })
                .collect()
        };
    if pairs.is_empty() {
        return Err(Error::Config(
            "no matching series between the two files".into(),
        ));
    }

    let mut table = String::from("a_series,b_series,size,a_ns,b_ns,ratio,winner\n");
    for ((ak, a), (bk, b)) in pairs {
        let cmp = report::compare_series(&a, &b)?;
        let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(stdout_io);
        w(out, format!("compare {ak} (a) vs {bk} (b)"))?;
        w(out, "size a_ns b_ns ratio winner".into())?;
        for r in &cmp.rows {
            let ratio = r
                .ratio
                .map_or("undefined".to_string(), |x| format!("{x:.4}"));
            let winner = match r.winner {
                Winner::A => "a",
                Winner::B => "b",
                Winner::Tie => "tie",
            };
            w(
                out,
                format!("{} {:.3} {:.3} {ratio} {winner}", r.size, r.a_ns, r.b_ns),
            )?;
            table.push_str(&format!(
                "{ak},{bk},{},{:.3},{:.3},{},{winner}\n",
                r.size,
                r.a_ns,
                r.b_ns,
                r.ratio.map_or(String::new(), |x| format!("{x:.6}"))
            ));
        }
        let geo = cmp
            .geomean_ratio
            .map_or("undefined".to_string(), |g| format!("{g:.4}"));
        w(
            out,
            format!(
                "a faster at fraction {:.3} of sizes; geometric-mean ratio a/b {geo}",
                cmp.a_win_fraction
            ),
        )?;
    }
    if let Some(path) = &args.out {
        std::fs::write(path, table).map_err(|e| Error::io(path, e))?;
    }
    Ok(0)
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let report = verify::verify_fixtures(&args.fixtures)?;
    writeln!(out, "{report}").map_err(stdout_io)?;
    Ok(if report.passed() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_accepts_hex() {
        assert_eq!(parse_u64("0xDEADBEEF").unwrap(), 0xDEAD_BEEF);
        assert_eq!(parse_u64("42").unwrap(), 42);
        assert!(parse_u64("-1").is_err());
    }

    #[test]
    fn thresholds_only_for_sweep() {
        let cli = Cli::try_parse_from([
            "langbench",
            "run",
            "--family",
            "dict-ops",
            "--thresholds",
            "4,8",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else {
            panic!()
        };
        assert!(config_from_args(&args).is_err());

        let cli = Cli::try_parse_from([
            "langbench",
            "run",
            "--family",
            "hybrid-sweep",
            "--thresholds",
            "4,8",
            "--seed",
            "0x10",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else {
            panic!()
        };
        let cfg = config_from_args(&args).unwrap();
        assert_eq!(cfg.thresholds.len(), 2);
        assert_eq!(cfg.seed, 16);
        assert_eq!(cfg.record_count(), 40 * 4);
    }

    #[test]
    fn missing_family_is_usage_error() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(["langbench", "run", "--probes", "1"], &mut out, &mut err);
        assert_ne!(code, 0);
        assert!(String::from_utf8(err).unwrap().contains("--family"));
    }
}
