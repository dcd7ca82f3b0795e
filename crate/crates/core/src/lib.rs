//! Finite-alphabet Rényi information measures.
//!
//! The crate computes the two-parameter conditional entropy
//! `H̃_{α,β}(X|Y)` and mutual information `Ĩ_{α,β}(X:Y)` on the extended
//! square `(α, β) ∈ [0, ∞]²`, the classical one-parameter quantities they
//! unify, relative-entropy variational forms solved over the probability
//! simplex, and strong-converse exponents for privacy amplification and
//! soft covering together with exact small-scale protocol simulations.
//!
//! All logarithms are base 2; every value is in bits.
//!
//! The crate is `no_std` and needs only `alloc`. IO, file formats, the
//! command-line surface and thread pools live in the `renyi-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classic;
pub mod dist;
pub mod exponents;
pub mod math;
pub mod order;
pub mod props;
pub mod protocol;
pub mod random;
pub mod simplex;
pub mod two_param;
pub mod variational;

pub use classic::{
    cond_entropy_variant, cond_renyi_divergence, mutual_info_variant, renyi_divergence,
    renyi_entropy, Branch, CondEntropyVariant, MeasureError, MeasureResult, MutualInfoVariant,
};
pub use dist::{CondPmf, DistError, JointPmf, Pmf, Support};
pub use exponents::{
    one_shot_pa_lower_bound, pa_dual_exponent, pa_exponent, sc_dual_exponent, sc_exponent,
    DualReport, ExponentBranch, ExponentConfig, ExponentError, ExponentResult, Rate,
};
pub use order::{ExtOrder, OrderError, OrderPair};
pub use simplex::{minimize_over_joint, OptReport, SimplexObjective, SolverConfig, SolverError};
pub use two_param::{h_tilde, i_tilde, TwoParamBranch, TwoParamError, TwoParamResult};
pub use props::{run_properties, MeasureSource, PropertyId, PropertyOutcome, VerifyConfig};
pub use protocol::{
    check_one_shot_sc_bound, pa_apply_hash, pa_min_divergence_exhaustive, pa_one_shot_bound,
    pa_universal_family_divergence, sc_expected_divergence_exact, sc_expected_divergence_mc,
    sc_one_shot_bound,
    Codebook, HashSpec, ProtocolError, SimRecord,
};
