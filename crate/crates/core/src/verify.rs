//! Checks against the golden fixture files shared by every component.
//!
//! * `prng_known_answers.csv`: `seed,index,u64_hex`, raw generator outputs.
//! * `input_checksums.csv`: `kind,seed,n,checksum_hex` for whole workloads.
//! * `probe_checksums.csv`: `family,seed,size,probe,checksum_hex` for the
//!   input a given probe of a given cell receives.
//!
//! The report text is deterministic so two components' outputs can be diffed.

use std::fmt;
use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{self, Family};
use crate::prng::{self, SplitMix64};

pub const KNOWN_ANSWERS_FILE: &str = "prng_known_answers.csv";
pub const INPUT_CHECKSUMS_FILE: &str = "input_checksums.csv";
pub const PROBE_CHECKSUMS_FILE: &str = "probe_checksums.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: u64,
    pub actual: u64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} expected={:016x} actual={:016x}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.actual
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "verify: {} checks, {} failed", self.checks.len(), failed)
    }
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().quoting(false).from_reader(file);
    let found = reader.headers().map_err(|e| err(1, e.to_string()))?;
    if !found.iter().eq(header.iter().copied()) {
        return Err(err(1, format!("expected header {:?}", header.join(","))));
    }
    reader
        .records()
        .map(|row| {
            let row = row.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            Ok((row.position().map_or(0, |p| p.line()), row))
        })
        .collect()
}

fn field<T: std::str::FromStr>(
    path: &Path,
    line: u64,
    row: &csv::StringRecord,
    i: usize,
) -> Result<T> {
    let raw = row.get(i).unwrap_or_default();
    raw.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse field {} ({raw:?})", i + 1),
    })
}

fn hex_field(path: &Path, line: u64, row: &csv::StringRecord, i: usize) -> Result<u64> {
    let raw = row.get(i).unwrap_or_default();
    u64::from_str_radix(raw, 16).map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("invalid hex {raw:?}"),
    })
}

pub fn check_known_answers(path: &Path) -> Result<Vec<Check>> {
    let rows = read_rows(path, &["seed", "index", "u64_hex"])?;
    rows.iter()
        .map(|(line, row)| {
            let seed: u64 = field(path, *line, row, 0)?;
            let index: u64 = field(path, *line, row, 1)?;
            let expected = hex_field(path, *line, row, 2)?;
            let mut g = SplitMix64::new(seed);
            let actual = (0..=index)
                .map(|_| g.next_u64())
                .last()
                .expect("index >= 0");
            Ok(Check {
                name: format!("prng seed={seed} index={index}"),
                expected,
                actual,
            })
        })
        .collect()
}

pub fn check_input_checksums(path: &Path) -> Result<Vec<Check>> {
    let rows = read_rows(path, &["kind", "seed", "n", "checksum_hex"])?;
    rows.iter()
        .map(|(line, row)| {
            let kind = row.get(0).unwrap_or_default();
            let seed: u64 = field(path, *line, row, 1)?;
            let n: usize = field(path, *line, row, 2)?;
            let expected = hex_field(path, *line, row, 3)?;
            let mut g = SplitMix64::new(seed);
            let actual = match kind {
                "sort_vector" => prng::f64_checksum(&g.make_sort_vector(n)),
                "kv_keys" => prng::u64_checksum(g.make_kv_workload(n).keys()),
                "kv_values" => prng::f64_checksum(g.make_kv_workload(n).values()),
                other => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: *line,
                        message: format!("unknown checksum kind {other:?}"),
                    })
                }
            };
            Ok(Check {
                name: format!("input {kind} seed={seed} n={n}"),
                expected,
                actual,
            })
        })
        .collect()
}

pub fn check_probe_checksums(path: &Path) -> Result<Vec<Check>> {
    let rows = read_rows(path, &["family", "seed", "size", "probe", "checksum_hex"])?;
    rows.iter()
        .map(|(line, row)| {
            let family: Family =
                row.get(0)
                    .unwrap_or_default()
                    .parse()
                    .map_err(|message| Error::Parse {
                        path: path.to_path_buf(),
                        line: *line,
                        message,
                    })?;
            let seed: u64 = field(path, *line, row, 1)?;
            let size: usize = field(path, *line, row, 2)?;
            let probe: u64 = field(path, *line, row, 3)?;
            let expected = hex_field(path, *line, row, 4)?;
            Ok(Check {
                name: format!("probe {family} seed={seed} size={size} probe={probe}"),
                expected,
                actual: harness::probe_input_checksum(seed, family, size, probe),
            })
        })
        .collect()
}

/// Runs every fixture check found in `dir`.
pub fn verify_fixtures(dir: impl AsRef<Path>) -> Result<VerifyReport> {
    let dir = dir.as_ref();
    let mut checks = check_known_answers(&dir.join(KNOWN_ANSWERS_FILE))?;
    checks.extend(check_input_checksums(&dir.join(INPUT_CHECKSUMS_FILE))?);
    checks.extend(check_probe_checksums(&dir.join(PROBE_CHECKSUMS_FILE))?);
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn fixture_dir() -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
    }

    #[test]
    fn shipped_fixtures_pass() {
        let report = verify_fixtures(fixture_dir()).unwrap();
        assert_eq!(report.checks.len(), 24 + 3 + 20);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn edited_fixture_fails() {
        let dir = tempfile::tempdir().unwrap();
        for name in [
            KNOWN_ANSWERS_FILE,
            INPUT_CHECKSUMS_FILE,
            PROBE_CHECKSUMS_FILE,
        ] {
            fs::copy(fixture_dir().join(name), dir.path().join(name)).unwrap();
        }
        let path = dir.path().join(KNOWN_ANSWERS_FILE);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("e220a8397b1dcdaf", "e220a8397b1dcdae")).unwrap();

        let report = verify_fixtures(dir.path()).unwrap();
        assert!(!report.passed());
        let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        assert_eq!(failed, ["prng seed=0 index=0"]);
        assert!(report.to_string().ends_with("verify: 47 checks, 1 failed"));
    }

    #[test]
    fn malformed_fixture_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "seed,index,u64_hex\n0,0,zz\n").unwrap();
        let err = check_known_answers(&path).unwrap_err();
        assert!(err.to_string().contains("bad.csv:2"), "{err}");
    }
}
