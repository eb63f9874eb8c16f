//! Recursively constructed labelings on downward directed lattice graphs,
//! checks of their structural properties (jump-freeness, regressive
//! regularity), and the structured subset-sum instances they induce.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: points of `N^k`, order types, cubes `E^k`, capping.
//! - [`graph`]: downward graphs induced on finite domains.
//! - [`labelers`]: `t̂_D`, the committee model `ŝ_D`, and `h^ρ_D`.
//! - [`regularity`]: regressive regularity, block partitions, cube search,
//!   jump-free checks.
//! - [`subsetsum`]: instance sets, the structured solver, the oracle.
//! - [`harness`]: experiment configs, seeded trial suites, run records.

pub mod error;
pub mod graph;
pub mod harness;
pub mod labelers;
pub mod lattice;
pub mod regularity;
pub mod rules;
mod seed;
pub mod subsetsum;

pub use error::{Error, Result};
pub use graph::{build_induced, layers, DownwardGraph, EdgeRule};
pub use labelers::{
    h_rho, s_hat, t_hat, validate_selection, Invocation, LabelOptions, Labeling,
    PartialSelection, Report, RhoFamily, SelectionFunction,
};
pub use lattice::{
    cap_restrict, enumerate_order_types, is_capped_by, order_equivalent, rank_vector, set_max,
    surjection_count, Cube, Domain, OrderType, Point,
};
pub use regularity::{
    check_regularity, find_regular_cube, jump_free_check, partition_blocks, regressive_values,
    Block, BlockPartition, RegularityReport,
};
pub use rules::RuleDescriptor;
pub use subsetsum::{
    build_instances, design_t_log_rho, is_t_log_bounded, solve_oracle, solve_structured, IRule,
    InstanceSet, SolveResult, Term,
};
