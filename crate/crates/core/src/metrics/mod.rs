//! Distance, quality and fairness measurements on rankings.
//!
//! | Metric | Range | Notes |
//! |--------|-------|-------|
//! | Kendall tau distance | `[0, k(k-1)/2]` | discordant pairs |
//! | Kendall tau coefficient | `[-1, 1]` | `1 - 4 d / (k (k-1))` |
//! | Spearman distance | `[0, inf)` | sum of squared displacements |
//! | DCG / NDCG | `[0, inf)` / `[0, 1]` | natural-log discount `1 / ln(1 + i)` |
//! | Infeasible index | `[0, 2 |pi|]` | lower + upper prefix violations |
//! | PPfair | `(-inf, 100]` | `100 (1 - II / |pi|)` |

mod distance;
mod fairness;
mod quality;

pub use distance::{footrule_distance, kendall_tau, kendall_tau_coefficient, spearman_distance};
pub use fairness::{infeasible_index, is_fair, is_weakly_fair, ppfair, FairnessReport};
pub use quality::{dcg, ideal_dcg, ndcg, position_discount};
