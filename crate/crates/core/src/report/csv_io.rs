//! The shared CSV result format.
//!
//! `family,component,algorithm,threshold_k,operation,size,probes,mean_ns`,
//! LF line endings, no quoting, empty fields for absent values and
//! `mean_ns` with exactly three fractional digits.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{Cell, MeasurementRecord};

pub const CSV_HEADER: &str = "family,component,algorithm,threshold_k,operation,size,probes,mean_ns";

fn format_row(r: &MeasurementRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}\n",
        r.family,
        r.component,
        r.cell.algorithm(),
        r.cell
            .threshold_k()
            .map(|k| k.to_string())
            .unwrap_or_default(),
        r.cell.operation().map(|o| o.label()).unwrap_or_default(),
        r.size,
        r.probes,
        r.mean_ns,
    )
}

/// Streams records to a writer, flushing after each row so an aborted run
/// leaves every finished measurement on disk.
pub struct RecordWriter<W: Write> {
    out: W,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn write(&mut self, record: &MeasurementRecord) -> io::Result<()> {
        self.out.write_all(format_row(record).as_bytes())?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn write_records<W: Write>(out: W, records: &[MeasurementRecord]) -> io::Result<W> {
    let mut w = RecordWriter::new(out)?;
    for r in records {
        w.write(r)?;
    }
    Ok(w.into_inner())
}

pub fn write_csv(records: &[MeasurementRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(BufWriter::new(file), records)
        .and_then(|mut w| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<MeasurementRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_records(file, path)
}

/// Parses a result file. `source` only labels error messages.
pub fn parse_records<R: Read>(input: R, source: &Path) -> Result<Vec<MeasurementRecord>> {
    let err = |line: u64, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .from_reader(input);

    let header = reader.headers().map_err(|e| err(1, e.to_string()))?;
    let header: Vec<&str> = header.iter().collect();
    if header.join(",") != CSV_HEADER {
        return Err(err(1, format!("expected header {CSV_HEADER:?}")));
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        records.push(parse_row(&row).map_err(|m| err(line, m))?);
    }
    Ok(records)
}

fn parse_row(row: &csv::StringRecord) -> Result<MeasurementRecord, String> {
    let field = |i: usize| row.get(i).unwrap_or_default();
    let optional = |i: usize| Some(field(i)).filter(|s| !s.is_empty());

    let family = field(0).parse()?;
    let component = field(1).to_string();
    if component.is_empty() {
        return Err("empty component".into());
    }
    let threshold_k = optional(3)
        .map(|s| {
            s.parse::<usize>()
                .map_err(|e| format!("threshold_k {s:?}: {e}"))
        })
        .transpose()?;
    let operation = optional(4).map(str::parse).transpose()?;
    let cell = Cell::from_parts(field(2), threshold_k, operation)?;
    if !cell.belongs_to(family) {
        return Err(format!("{cell} does not belong to family {family}"));
    }
    let size: usize = field(5)
        .parse()
        .map_err(|e| format!("size {:?}: {e}", field(5)))?;
    let probes: u64 = field(6)
        .parse()
        .map_err(|e| format!("probes {:?}: {e}", field(6)))?;
    if size == 0 || probes == 0 {
        return Err("size and probes must be positive".into());
    }
    let mean_ns = field(7).parse()?;
    Ok(MeasurementRecord {
        family,
        component,
        cell,
        size,
        probes,
        mean_ns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::HybridConfig;
    use crate::dict_workload::AdsKind;
    use crate::harness::{Family, MeanNs, Operation};

    fn record(family: Family, cell: Cell, size: usize, millis: u64) -> MeasurementRecord {
        MeasurementRecord {
            family,
            component: "rust".into(),
            cell,
            size,
            probes: 10,
            mean_ns: MeanNs::from_millis(millis),
        }
    }

    fn to_string(records: &[MeasurementRecord]) -> String {
        String::from_utf8(write_records(Vec::new(), records).unwrap()).unwrap()
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(to_string(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn row_layout() {
        let rows = [
            record(Family::SortCrossover, Cell::MergeSort, 25, 1_234_500),
            record(
                Family::HybridSweep,
                Cell::HybridSort(HybridConfig::new(128).unwrap()),
                250,
                7,
            ),
            record(
                Family::DictOps,
                Cell::Dict(AdsKind::OrderedTreeMap, Operation::Delete),
                100,
                10_000,
            ),
        ];
        let text = to_string(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "sort-crossover,rust,merge_sort,,,25,10,1234.500");
        assert_eq!(lines[2], "hybrid-sweep,rust,hybrid_sort,128,,250,10,0.007");
        assert_eq!(lines[3], "dict-ops,rust,tree_map,,delete,100,10,10.000");
        assert!(!text.contains('\r'));

        let one = to_string(&rows[..1]);
        assert_eq!(one.lines().count(), 2);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = format!(
            "{CSV_HEADER}\nsort-crossover,rust,merge_sort,,,25,10,1.000\nsort-crossover,rust,merge_sort,,,25,10,1.0\n"
        );
        let err = parse_records(text.as_bytes(), Path::new("x.csv")).unwrap_err();
        assert!(err.to_string().starts_with("x.csv:3:"), "{err}");

        let err = parse_records("a,b\n".as_bytes(), Path::new("y.csv")).unwrap_err();
        assert!(err.to_string().starts_with("y.csv:1:"), "{err}");
    }

    #[test]
    fn parse_rejects_inconsistent_rows() {
        for row in [
            "dict-ops,rust,merge_sort,,,25,10,1.000",
            "sort-crossover,rust,hybrid_sort,16,,25,10,1.000",
            "hybrid-sweep,rust,hybrid_sort,,,25,10,1.000",
            "dict-ops,rust,hash_map,,,25,10,1.000",
            "sort-crossover,,merge_sort,,,25,10,1.000",
            "sort-crossover,rust,merge_sort,,,0,10,1.000",
            "sort-crossover,rust,merge_sort,,,25,10",
        ] {
            let text = format!("{CSV_HEADER}\n{row}\n");
            assert!(
                parse_records(text.as_bytes(), Path::new("z")).is_err(),
                "{row}"
            );
        }
    }

    #[test]
    fn mirror_rows_parse() {
        let text =
            format!("{CSV_HEADER}\nsort-crossover,cpp-O0,insertion_sort,,,25,10000,150.250\n");
        let recs = parse_records(text.as_bytes(), Path::new("mirror.csv")).unwrap();
        assert_eq!(recs[0].component, "cpp-O0");
        assert_eq!(recs[0].mean_ns.as_f64(), 150.25);
    }

    fn arb_record() -> impl proptest::strategy::Strategy<Value = MeasurementRecord> {
        use proptest::prelude::*;
        let cell = prop_oneof![
            Just((Family::SortCrossover, Cell::InsertionSort)),
            Just((Family::SortCrossover, Cell::MergeSort)),
            (1usize..4096).prop_map(|k| (
                Family::HybridSweep,
                Cell::HybridSort(HybridConfig::new(k).unwrap())
            )),
            (any::<bool>(), any::<bool>()).prop_map(|(h, i)| (
                Family::DictOps,
                Cell::Dict(
                    if h {
                        AdsKind::HashMap
                    } else {
                        AdsKind::OrderedTreeMap
                    },
                    if i {
                        Operation::Insert
                    } else {
                        Operation::Delete
                    },
                )
            )),
        ];
        (
            cell,
            "[a-z0-9+_-]{1,12}",
            1usize..1_000_000,
            1u64..100_000,
            any::<u64>(),
        )
            .prop_map(|((family, cell), component, size, probes, millis)| {
                MeasurementRecord {
                    family,
                    component,
                    cell,
                    size,
                    probes,
                    mean_ns: MeanNs::from_millis(millis),
                }
            })
    }

    proptest::proptest! {
        #[test]
        fn write_then_parse_is_identity(
            records in proptest::collection::vec(arb_record(), 0..40)
        ) {
            let bytes = write_records(Vec::new(), &records).unwrap();
            let back = parse_records(&bytes[..], Path::new("mem")).unwrap();
            proptest::prop_assert_eq!(&back, &records);
            proptest::prop_assert_eq!(write_records(Vec::new(), &back).unwrap(), bytes);
        }
    }
}
