//! Hierarchical interval indexes for in-memory overlap queries.
//!
//! [`hint::HintIndex`] answers queries on a small integer domain without
//! comparing endpoints. [`hint_m::HintMIndex`] handles arbitrary domains
//! with a fixed number of levels, and [`hint_m::HybridIndex`] adds
//! updates. [`tuning`] picks the level count, [`baselines`] holds the
//! reference indexes and [`bench`] drives them all.
//!
//! ```
//! use hint_index::domain::{Interval, QueryRange};
//! use hint_index::hint_m::{BuildOptions, HintMIndex};
//!
//! let data = vec![Interval::new(0, 10, 20).unwrap(), Interval::new(1, 30, 90).unwrap()];
//! let index = HintMIndex::build_covering(&data, 4, BuildOptions::default()).unwrap();
//! let mut ids = index.range_query(&QueryRange::new(15, 35));
//! ids.sort();
//! assert_eq!(ids.len(), 2);
//! ```

pub mod baselines;
pub mod bench;
pub mod domain;
pub mod error;
pub mod hint;
pub mod hint_m;
mod layout;
pub mod probe;
pub mod tuning;
pub mod workload;
