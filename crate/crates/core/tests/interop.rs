//! The surfaces a second-language implementation relies on: the result CSV
//! it must emit and the per-probe input checksums it must reproduce.

use std::fs;
use std::path::Path;

use langbench::harness::{probe_input_checksum, Family};
use langbench::report::{self, compare_series, series_from_records, CSV_HEADER};
use langbench::verify;

/// A result file in the exact layout a C++ build would write.
fn mirror_csv(component: &str, sizes: &[usize], scale: f64) -> String {
    let mut text = format!("{CSV_HEADER}\n");
    for &n in sizes {
        for (alg, base) in [
            ("insertion_sort", n as f64 * n as f64 / 50.0),
            ("merge_sort", n as f64 * 40.0),
        ] {
            text.push_str(&format!(
                "sort-crossover,{component},{alg},,,{n},10000,{:.3}\n",
                base * scale
            ));
        }
    }
    text
}

#[test]
fn mirror_csv_parses_and_compares_over_shared_grid() {
    let grid: Vec<usize> = (1..=10).map(|i| i * 100).collect();
    let dir = tempfile::tempdir().unwrap();
    let primary = dir.path().join("primary.csv");
    let mirror = dir.path().join("mirror.csv");
    fs::write(&primary, mirror_csv("rust", &grid, 1.0)).unwrap();
    fs::write(&mirror, mirror_csv("cpp-O2", &grid, 0.5)).unwrap();

    let a = series_from_records(&report::read_csv(&primary).unwrap()).unwrap();
    let b = series_from_records(&report::read_csv(&mirror).unwrap()).unwrap();
    assert_eq!(a.len(), 2);
    for ((ak, a), (bk, b)) in a.iter().zip(&b) {
        assert_eq!(ak.cell, bk.cell);
        let cmp = compare_series(a, b).unwrap();
        assert_eq!(cmp.rows.len(), 10);
        assert!((cmp.geomean_ratio.unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(cmp.a_win_fraction, 0.0);
    }

    let out = std::process::Command::new(env!("CARGO_BIN_EXE_langbench"))
        .args(["analyze", "compare", "--a"])
        .arg(&primary)
        .arg("--b")
        .arg(&mirror)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("compare rust/insertion_sort (a) vs cpp-O2/insertion_sort (b)"));
    assert!(text.contains("compare rust/merge_sort (a) vs cpp-O2/merge_sort (b)"));
}

#[test]
fn probe_checksum_fixture_covers_all_families() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/probe_checksums.csv");
    let checks = verify::check_probe_checksums(&path).unwrap();
    assert_eq!(checks.len(), 20);
    assert!(checks.iter().all(|c| c.passed()));
    for family in Family::ALL {
        assert!(checks.iter().any(|c| c.name.contains(family.label())));
    }
}

#[test]
fn probe_inputs_depend_on_every_coordinate() {
    let base = probe_input_checksum(1, Family::SortCrossover, 500, 1);
    assert_ne!(base, probe_input_checksum(2, Family::SortCrossover, 500, 1));
    assert_ne!(base, probe_input_checksum(1, Family::HybridSweep, 500, 1));
    assert_ne!(base, probe_input_checksum(1, Family::SortCrossover, 525, 1));
    assert_ne!(base, probe_input_checksum(1, Family::SortCrossover, 500, 2));
}
