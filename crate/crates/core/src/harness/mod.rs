//! Synthetic data generation, the train/test benchmark protocol and its
//! reports.

mod benchmark;
mod config;
mod dataset;
mod profiles;
mod report;
mod seeds;
mod stats;

pub use benchmark::{
    run_benchmark, run_benchmark_with, run_method, BenchmarkData, BenchmarkReport, MethodSummary,
    ReportBody, ReportTiming, RunRow, TimingSummary,
};
pub use config::{BoSettings, ExperimentConfig, GdSettings, Method, PsoSettings};
pub use dataset::{
    generate_synthetic_dataset, load_dataset, read_profile_csv, write_dataset, write_profile_csv,
    DatasetManifest, ManifestEntry, MANIFEST_FILE,
};
pub use profiles::{check_soc_window, generate_profile, ProfileKind, ProfileSpec, SOC_WINDOW};
pub use report::{
    export_report, write_boxplot_csv, write_convergence_csv, write_summary_csv, write_voltage_error_csv,
    BOXPLOT_FILE, CONVERGENCE_FILE, REPORT_FILE, SUMMARY_FILE, TRACES_DIR,
};
pub use seeds::split_seed;
pub use stats::mean_variance;
