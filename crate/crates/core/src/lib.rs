//! Exact range queries over z-normalized time series.
//!
//! Series are represented at several segmentation levels by a SAX word and
//! by the distance to their own per-frame least-squares line fit. At query
//! time two lower bounds prune the database level by level: the gap between
//! the query's and the series' fit residuals, and MINDIST between their
//! words. Survivors are checked against the true Euclidean distance, so the
//! answer set is always exact.

pub mod bench;
pub mod error;
pub mod index;
pub mod ops;
pub mod pla;
pub mod query;
pub mod sax;
pub mod series;

pub use error::{Error, Result};
pub use index::{build_index, load_index, save_index, LevelConfig, LevelEntry, MultiLevelIndex};
pub use ops::OpCounts;
pub use query::{
    exclude_eq10, exclude_eq9, linear_scan, query_residuals, range_query, range_query_ordered,
    sax_only_query, CascadeOrder, LevelCounters, QueryReport, RangeQuery,
};
pub use sax::{breakpoints, BreakpointTable, PaaVector, SaxWord};
pub use series::{euclidean, load_ucr, znormalize, Dataset, SeriesId, TimeSeries};
