//! Proportionately fair re-ranking.
//!
//! Candidates carry scores and categorical attributes; a [`GroupAssignment`]
//! partitions them into protected groups and a [`FairnessSpec`] bounds each
//! group's share of every prefix. The [`rankers`] module holds the re-ranking
//! algorithms, [`metrics`] the quality, distance and fairness measures, and
//! [`mallows`] the Mallows model used to randomize a fair center.
//!
//! ```
//! use fairrank::{CandidateSet, FairnessSpec, GroupAssignment, RankingTask};
//! use fairrank::rankers::{exact_fair_dcg, Ranker, RankerConfig, RankerRegistry};
//!
//! let set = CandidateSet::from_scores(&[0.9, 0.8, 0.7, 0.3, 0.2, 0.1]).unwrap();
//! let groups = GroupAssignment::new("g", vec!["a".into(), "b".into()], vec![0, 0, 0, 1, 1, 1]).unwrap();
//! let spec = FairnessSpec::proportional(&groups, 1).unwrap();
//! let task = RankingTask::new(&set, &groups, &spec).unwrap();
//!
//! let best = exact_fair_dcg(&task).unwrap();
//! assert_eq!(best.ranking.order(), [0, 3, 1, 4, 2, 5]);
//!
//! let mallows = RankerRegistry::with_builtins()
//!     .build("mallows", &RankerConfig { samples: 15, ..Default::default() })
//!     .unwrap();
//! let out = mallows.rank(&task.clone().with_seed(7)).unwrap();
//! assert!(out.ranking.is_permutation_of(6));
//! ```

pub mod bounds;
pub mod error;
pub mod groups;
pub mod mallows;
pub mod metrics;
pub mod noise;
pub mod rankers;
pub mod ranking;
pub mod rng;

pub use error::{Error, Result};
pub use groups::{group_counts_in_prefix, FairnessSpec, GroupAssignment};
pub use mallows::MallowsParams;
pub use metrics::FairnessReport;
pub use noise::{NoiseScheme, NoiseSpec};
pub use rankers::{Ranker, RankerConfig, RankerOutput, RankerRegistry, RankingTask, SelectionCriterion};
pub use ranking::{ranking_from_scores, Candidate, CandidateSet, Ranking};
