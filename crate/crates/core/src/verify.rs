//! Structural condition checks and the finite-horizon verification that
//! feedback does not raise the per-symbol rate beyond the iid optimum.

use crate::channel::{ChannelParams, ReceptorState};
use crate::directed::{lemma2_flatness, max_feedback_di, PolicyClass, PolicySearch};
use crate::error::{Error, Result};
use crate::markov::{strong_aperiodicity, strong_irreducibility, support_matrix, SupportMatrix};
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};

const FLATNESS_TOL: f64 = 1e-10;
const CLASS_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-14;

/// Per-state response matrices: for each previous receptor state, the
/// matrix of next-state probabilities with one column per input symbol
/// (`L` first) and next states `U` then `B` down the rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionMatrix {
    pub unbound: [[f64; 2]; 2],
    pub bound: [[f64; 2]; 2],
}

pub fn condition_matrices(params: &ChannelParams) -> ConditionMatrix {
    let (a_l, a_h, beta) = (params.alpha_l(), params.alpha_h(), params.beta());
    ConditionMatrix {
        unbound: [[1.0 - a_l, 1.0 - a_h], [a_l, a_h]],
        bound: [[beta, beta], [1.0 - beta, 1.0 - beta]],
    }
}

/// Structure of the unbound-state response matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RUnboundCase {
    /// The two input columns coincide; the input is invisible.
    IdenticalColumns,
    /// Full rank; the input is distinguishable from the unbound state.
    Rank2,
}

/// Outcome of the structural checks behind the feedback-capacity equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub matrices: ConditionMatrix,
    pub support: SupportMatrix,
    pub strongly_irreducible: bool,
    pub strongly_aperiodic: bool,
    /// The bound-state response does not depend on the input.
    pub bound_state_input_free: bool,
    pub unbound_case: RUnboundCase,
    pub strict_interior: bool,
    /// All conditions hold, including strict interiority; boundary
    /// parameters can satisfy the support conditions while degenerating
    /// the stationary behavior, so interiority is required here.
    pub theorem1_applicable: bool,
}

pub fn check_conditions(params: &ChannelParams) -> ConditionReport {
    let matrices = condition_matrices(params);
    let support = support_matrix(params);
    let strongly_irreducible = strong_irreducibility(&support);
    let strongly_aperiodic = strong_aperiodicity(&support);
    let bound_state_input_free = (0..2).all(|r| {
        (matrices.bound[r][0] - matrices.bound[r][1]).abs() <= RANK_TOL
    });
    let det = params.alpha_l() - params.alpha_h();
    let unbound_case = if det.abs() > RANK_TOL {
        RUnboundCase::Rank2
    } else {
        RUnboundCase::IdenticalColumns
    };
    let strict_interior = params.is_strict_interior();
    let theorem1_applicable = strongly_irreducible
        && strongly_aperiodic
        && bound_state_input_free
        && unbound_case == RUnboundCase::Rank2
        && strict_interior;
    ConditionReport {
        matrices,
        support,
        strongly_irreducible,
        strongly_aperiodic,
        bound_state_input_free,
        unbound_case,
        strict_interior,
        theorem1_applicable,
    }
}

/// Finite-horizon verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub conditions: ConditionReport,
    pub horizon: usize,
    /// Horizon used for the flatness check (capped by the enumeration
    /// budget).
    pub flatness_horizon: usize,
    /// Maximum spread of total directed information over bound-state
    /// schedules with the unbound-state schedule held fixed.
    pub flatness_deviation: f64,
    pub iid: PolicySearch,
    pub stationary: PolicySearch,
    pub prev_output: PolicySearch,
    /// Present when the horizon admits the general-causal grid search.
    pub general_causal: Option<PolicySearch>,
    pub stationary_iid_gap: f64,
    /// Finite-horizon gain of time-varying previous-output policies over
    /// the stationary optimum; vanishes as the horizon grows but is
    /// positive at small horizons because the last step has no future.
    pub prev_output_gain: f64,
    pub general_causal_gain_over_prev: Option<f64>,
    pub flatness_pass: bool,
    pub stationary_matches_iid: bool,
    pub general_causal_within_prev: Option<bool>,
    pub pass: bool,
}

/// Runs the full verification at horizon `n`: structural conditions,
/// bound-state flatness, and the nested policy-class maximizations. The
/// general-causal search runs only when `n` is within its budget; the
/// flatness check caps its horizon at the enumeration budget.
pub fn verify_theorem1(
    params: &ChannelParams,
    n: usize,
    grid_resolution: usize,
    seed: u64,
) -> Result<TheoremReport> {
    if n < 2 {
        return Err(Error::invalid("n", "horizon must be >= 2"));
    }
    let conditions = check_conditions(params);
    let initial_state = ReceptorState::U;

    let nf = n.min(crate::directed::GENERAL_CAUSAL_HORIZON_CAP).min(6);
    let rng = CounterRng::new(seed);
    let u_schedule: Vec<f64> = (0..nf).map(|i| rng.uniform(0, i as u64)).collect();
    let mut b_grid = vec![vec![0.0; nf], vec![1.0; nf], vec![0.5; nf]];
    for s in 1..=3u64 {
        b_grid.push((0..nf).map(|i| rng.uniform(s, i as u64)).collect());
    }
    let flatness_deviation = lemma2_flatness(params, &u_schedule, &b_grid, initial_state, nf)?;

    let iid = max_feedback_di(params, PolicyClass::Iid, initial_state, n, grid_resolution, true)?;
    let stationary = max_feedback_di(
        params,
        PolicyClass::Stationary,
        initial_state,
        n,
        grid_resolution,
        true,
    )?;
    let prev_output = max_feedback_di(
        params,
        PolicyClass::PrevOutputOnly,
        initial_state,
        n,
        grid_resolution,
        true,
    )?;
    let general_causal = if n <= crate::directed::GENERAL_CAUSAL_SEARCH_CAP {
        Some(max_feedback_di(
            params,
            PolicyClass::GeneralCausal,
            initial_state,
            n,
            grid_resolution,
            false,
        )?)
    } else {
        None
    };

    let stationary_iid_gap = stationary.per_symbol_bits - iid.per_symbol_bits;
    let prev_output_gain = prev_output.per_symbol_bits - stationary.per_symbol_bits;
    let general_causal_gain_over_prev = general_causal
        .as_ref()
        .map(|gc| gc.per_symbol_bits - prev_output.per_symbol_bits);

    let flatness_pass = flatness_deviation < FLATNESS_TOL;
    let stationary_matches_iid = stationary_iid_gap.abs() < CLASS_TOL;
    let general_causal_within_prev = general_causal_gain_over_prev.map(|g| g < CLASS_TOL);
    let pass = conditions.theorem1_applicable
        && flatness_pass
        && stationary_matches_iid
        && general_causal_within_prev.unwrap_or(true)
        && prev_output_gain > -CLASS_TOL;

    Ok(TheoremReport {
        conditions,
        horizon: n,
        flatness_horizon: nf,
        flatness_deviation,
        iid,
        stationary,
        prev_output,
        general_causal,
        stationary_iid_gap,
        prev_output_gain,
        general_causal_gain_over_prev,
        flatness_pass,
        stationary_matches_iid,
        general_causal_within_prev,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, c: f64) -> ChannelParams {
        ChannelParams::new(a, b, c).unwrap()
    }

    #[test]
    fn conditions_interior_channel() {
        let r = check_conditions(&p(0.1, 0.9, 0.5));
        assert!(r.strongly_irreducible);
        assert!(r.strongly_aperiodic);
        assert!(r.bound_state_input_free);
        assert_eq!(r.unbound_case, RUnboundCase::Rank2);
        assert!(r.strict_interior);
        assert!(r.theorem1_applicable);
        for (row, want) in r.matrices.unbound.iter().zip([[0.9, 0.1], [0.1, 0.9]]) {
            for (v, w) in row.iter().zip(want) {
                assert!((v - w).abs() < 1e-15);
            }
        }
        assert_eq!(r.matrices.bound, [[0.5, 0.5], [0.5, 0.5]]);
    }

    #[test]
    fn conditions_degenerate_cases() {
        let flat = check_conditions(&p(0.3, 0.3, 0.5));
        assert_eq!(flat.unbound_case, RUnboundCase::IdenticalColumns);
        assert!(!flat.theorem1_applicable);

        let boundary = check_conditions(&p(0.1, 1.0, 0.5));
        assert!(!boundary.strict_interior);
        assert!(!boundary.theorem1_applicable);
        assert!(boundary.strongly_irreducible);

        let golden = check_conditions(&p(0.1, 0.9, 1.0));
        assert!(!golden.theorem1_applicable);

        let absorbing = check_conditions(&p(0.1, 0.9, 0.0));
        assert!(!absorbing.strongly_irreducible);
        assert!(!absorbing.theorem1_applicable);
    }

    #[test]
    fn verify_small_horizon() {
        let report = verify_theorem1(&p(0.1, 0.9, 0.5), 3, 4, 7).unwrap();
        assert!(report.conditions.theorem1_applicable);
        assert!(report.flatness_pass, "deviation {}", report.flatness_deviation);
        assert!(report.stationary_matches_iid, "gap {}", report.stationary_iid_gap);
        assert!(report.general_causal.is_some());
        assert_eq!(report.general_causal_within_prev, Some(true));
        assert!(report.prev_output_gain >= -1e-12);
        assert!(report.pass);
    }

    #[test]
    fn verify_larger_horizon_skips_general_causal() {
        let report = verify_theorem1(&p(0.2, 0.8, 0.4), 8, 4, 11).unwrap();
        assert!(report.general_causal.is_none());
        assert_eq!(report.general_causal_within_prev, None);
        assert!(report.flatness_pass);
        assert!(report.stationary_matches_iid);
        assert!(report.pass);
    }

    #[test]
    fn verify_rejects_tiny_horizon() {
        assert!(verify_theorem1(&p(0.1, 0.9, 0.5), 1, 4, 0).is_err());
    }
}
