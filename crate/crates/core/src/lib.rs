//! Multiway discrepancy of nonnegative rectangular arrays.
//!
//! For a table `A` and proper k-partitions `R_1..R_k` of its rows and
//! `C_1..C_k` of its columns, the discrepancy is the largest volume-scaled
//! deviation `|ρ(X,Y) − ρ(R_a,C_b)| √(Vol(X) Vol(Y))` over all block pairs
//! and subsets `X ⊆ R_a`, `Y ⊆ C_b`. `disc_k(A)` minimizes that over all
//! k-partitions.
//!
//! - [`table`]: the table model, cuts, volumes, densities.
//! - [`discrepancy`]: pairwise and partition discrepancy (exhaustive scan).
//! - [`spectral`]: normalized singular values, decomposability.
//! - [`search`]: exact `disc_k`, split refinement, contracted independence.
//! - [`generators`]: independent, blockwise, contracted-independent and
//!   random tables and graphs.
//! - [`verify`]: randomized checks of the continuity theorems and the
//!   structural propositions, plus monotonicity campaigns.
//!
//! The inner loops run on rayon when the `parallel` feature is enabled
//! (the default); results are identical in either mode.

pub mod discrepancy;
pub mod error;
pub mod exec;
pub mod generators;
pub mod partition;
pub mod rng;
pub mod search;
pub mod spectral;
pub mod table;
pub mod verify;

pub use discrepancy::{
    pair_discrepancy, pair_discrepancy_density_form, partition_discrepancy, partition_discrepancy_with,
    DiscrepancyReport, ScanConfig,
};
pub use error::{Axis, Error, Result};
pub use exec::Exec;
pub use partition::{Partition, PartitionSpec, SubsetPair};
pub use search::{
    contracted_matrix, exact_min_discrepancy, find_contracted_independent_2partition, is_contracted_independent,
    monotonicity_sweep, refine_split, ContractedMatrix, Method, SearchConfig, SearchResult,
};
pub use spectral::{is_non_decomposable, singular_values};
pub use table::ContingencyTable;
