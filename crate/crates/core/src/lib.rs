//! Capacity of the discrete-time two-state ligand-receptor transduction channel.
//!
//! The channel has a binary concentration input (`L`/`H`) and a binary
//! receptor output (`U`/`B`). Binding `U -> B` happens with probability
//! `alpha_L` or `alpha_H` depending on the input; unbinding `B -> U` happens
//! with probability `beta` regardless of the input. The crate computes
//!
//! * the closed-form iid mutual-information rate and its maximum,
//!   including the golden-ratio capacity limit `log2(phi)`,
//! * exact finite-horizon directed information for causal feedback
//!   policies, with both a full-joint enumeration engine and a fast
//!   Markov recursion,
//! * numerical verification that feedback does not help this channel
//!   (stationary, previous-output, and general causal policy classes all
//!   peak at the iid optimum),
//! * the Kabanov Poisson-channel capacity and a discrete-time
//!   convergence experiment towards it, and
//! * a continuous-time master-equation reference with a
//!   discretization-consistency check.

pub mod channel;
pub mod cli;
pub mod directed;
pub mod error;
pub mod iid;
pub mod markov;
pub mod ode;
pub mod opt;
pub mod poisson;
pub mod rng;
pub mod verify;

pub use channel::{
    AggregatedKernel, ChannelParams, ConcentrationSymbol, RateEstimate, ReceptorState,
    Trajectory, TransitionKernel,
};
pub use directed::{
    DiInit, DiRate, DirectedInfoResult, FeedbackPolicy, JointDistribution, PolicyClass,
    PolicySearch,
};
pub use error::{Error, Result};
pub use iid::CapacityResult;
pub use verify::{ConditionReport, RUnboundCase, TheoremReport};
