//! Diagnostics: per-sample records, CSV output, decay fits, the energy
//! growth monitor and plot emission.

pub mod bootstrap;
pub mod csv;
pub mod fit;
pub mod null_ratio;
pub mod plot;
pub mod record;

pub use bootstrap::{bootstrap_monitor, BootstrapReport};
pub use csv::{read_table, CsvWriter, Table, HEADER};
pub use fit::{fit_csv_column, fit_decay, DecayFit};
pub use null_ratio::null_ratio_monitor;
pub use plot::emit_plots;
pub use record::{record, DiagnosticsRecord, RecordSettings};
