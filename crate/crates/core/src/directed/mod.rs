//! Exact finite-horizon directed information over the transduction channel.
//!
//! Two computation paths: a full-joint enumeration engine valid for every
//! causal policy (exponential in the horizon), and a Markov recursion for
//! policies that condition on at most the previous output (linear in the
//! horizon). The two are checked against each other in tests.

mod joint;
mod policy;
mod search;

pub use joint::{
    build_joint, di_rate_estimate, directed_information, directed_information_enumerated,
    lemma2_flatness, DiInit, DiRate, DirectedInfoResult, JointDistribution, JointTable,
    GENERAL_CAUSAL_HORIZON_CAP, MARKOV_HORIZON_CAP,
};
pub use policy::{FeedbackPolicy, GeneralCausalPolicy, PolicyClass, PrevOutputPolicy};
pub use search::{max_feedback_di, PolicySearch, GENERAL_CAUSAL_SEARCH_CAP};
