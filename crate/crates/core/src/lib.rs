//! Swap-based search for packings of two bounded-degree graphs.
//!
//! The blue graph keeps the identity labelling and the red graph is moved
//! over the ground set by a permutation. Conflicts ("purple" edges) are
//! removed by cyclic label swaps of length two or three. Around that search
//! the crate provides exact small-instance oracles, reproducible instance
//! generators with forbidden 4-, 6- and 8-cycles, audits of the
//! second-neighbourhood intersection bounds, and the threshold arithmetic
//! behind the large-degree packing result for even girth at least ten.

pub mod analyzer;
pub mod campaign;
pub mod cycles;
pub mod error;
pub mod formats;
pub mod generators;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod swap;

pub use analyzer::{
    audit_claim41, audit_claim42, audit_nbound, corradi_bound, profile, thresholds, Analyzer,
    BoundAudit, Claim42Audit, CorradiCheck, MixedAudit, NBoundAudit, NeighborhoodProfile, SetFamily,
    ThresholdReport,
};
pub use cycles::{find_cycle_of_length, find_even_short_cycle, Cycle};
pub use error::{Error, Result};
pub use generators::{generate, standard_family, Family, GenSpec, Generated};
pub use graph::{composed_neighborhood, has_link, neighborhood, Graph, VertexSet};
pub use model::{
    condition_profile, is_packing, purple_report, ConditionProfile, Labelling, PackingInstance,
    PurpleReport, PurpleState,
};
pub use oracle::{exact_pack, min_purple_labellings, verify_eaton_smallscale, ExactConfig, OracleResult};
pub use solver::{
    restart_labelling, solve, solve_multistart, DescentPolicy, MoveKind, SolveOptions, SolveOutcome, SolveStatus,
    StuckCertificate, TraceStep,
};
pub use campaign::{run_campaign, ExperimentConfig, ExperimentKind, ResultRecord};
pub use swap::{apply_swap, find_claim32_3swap, find_reducing_2swap, is_safe_swap, SwapCycle};
