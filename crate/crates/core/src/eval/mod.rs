//! Experimental protocols: splits, benchmark tables, rank aggregation,
//! shrinking-window survival, serial-classifier detection and the
//! inference-time frontier.

pub mod benchmark;
pub mod frontier;
pub mod ranks;
pub mod serial;
pub mod splits;
pub mod survival;

pub use benchmark::{evaluate, read_records, run_benchmark, write_records, BenchmarkData, BenchmarkRecord, RunStatus};
pub use frontier::{frontier_from_records, pareto_frontier, FrontierPoint};
pub use ranks::{average_ranks, cell_ranks, rank_with_ties};
pub use serial::{minimal_serial_prefix, serial_prefix, PrefixClassifier, Truncating, WindowedModels};
pub use splits::{make_splits, SplitSpec, DEFAULT_SPLITS};
pub use survival::{survival, SurvivalConfig, SurvivalMode, SurvivalTable};
