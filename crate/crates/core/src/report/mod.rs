//! Result files and the analyses run over them.

mod analysis;
mod csv_io;
mod plot;

pub use analysis::{
    compare_series, find_crossings, select_best_k, series_from_records, BestK, Comparison,
    CrossingReport, KScore, RatioRow, SeriesKey, TimingSeries, Winner,
};
pub use csv_io::{parse_records, read_csv, write_csv, write_records, RecordWriter, CSV_HEADER};
pub use plot::{emit_plot_data, expected_table_count, plot_tables, PlotTable};
