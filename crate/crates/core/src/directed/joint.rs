//! Joint distributions and directed information.
//!
//! Directed information over horizon `n` is the sum of the conditional
//! mutual informations `I(X^i; Y_i | Y^{i-1})`. The enumeration path
//! materializes the exact `(x^n, y^n)` table and marginalizes each term;
//! the Markov path exploits that the output is first-order Markov under
//! previous-output policies, so each term reduces to
//! `H(Y_i | Y_{i-1}) - H(Y_i | Y_{i-1}, X_i)` driven by the aggregated
//! kernel.

use crate::channel::{kernel_for_input, ChannelParams, ConcentrationSymbol, ReceptorState};
use crate::directed::policy::{FeedbackPolicy, PolicyClass};
use crate::error::{Error, Result};
use crate::markov::h2;
use serde::{Deserialize, Serialize};

/// Horizon cap for the explicit `4^n` table.
pub const GENERAL_CAUSAL_HORIZON_CAP: usize = 10;
/// Horizon cap for the Markov recursion.
pub const MARKOV_HORIZON_CAP: usize = 24;

/// Exact probability table over `(x^n, y^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub horizon: usize,
    pub initial_state: ReceptorState,
    /// Indexed by `(x_idx << n) | y_idx`; bit `n - i` of each index holds
    /// step `i` (earliest step in the highest bit, `H`/`B` = 1).
    pub probs: Vec<f64>,
}

impl JointTable {
    pub fn prob(&self, x_idx: usize, y_idx: usize) -> f64 {
        self.probs[(x_idx << self.horizon) | y_idx]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// A finite-horizon joint distribution: an explicit table, or an implicit
/// handle for Markov-class policies beyond the table budget.
#[derive(Debug, Clone, PartialEq)]
pub enum JointDistribution {
    Table(JointTable),
    /// The causal factorization held symbolically; queries go through the
    /// Markov recursion.
    Implicit {
        params: ChannelParams,
        policy: FeedbackPolicy,
        initial_state: ReceptorState,
        horizon: usize,
    },
}

impl JointDistribution {
    pub fn horizon(&self) -> usize {
        match self {
            JointDistribution::Table(t) => t.horizon,
            JointDistribution::Implicit { horizon, .. } => *horizon,
        }
    }
}

fn enumerate_table(
    params: &ChannelParams,
    policy: &FeedbackPolicy,
    initial_state: ReceptorState,
    n: usize,
) -> JointTable {
    let kernels = [
        kernel_for_input(params, ConcentrationSymbol::L),
        kernel_for_input(params, ConcentrationSymbol::H),
    ];
    let size = 1usize << (2 * n);
    let mut probs = vec![0.0; size];
    let ymask = (1usize << n) - 1;
    for idx in 0..size {
        let x_idx = idx >> n;
        let y_idx = idx & ymask;
        let mut p = 1.0;
        for i in 1..=n {
            let shift = n - i;
            let x_hist = x_idx >> (shift + 1);
            let y_hist = y_idx >> (shift + 1);
            let x_bit = (x_idx >> shift) & 1;
            let y_bit = (y_idx >> shift) & 1;
            let y_prev = if i == 1 {
                initial_state.index()
            } else {
                y_hist & 1
            };
            let p_l = policy.p_l(i, x_hist, y_hist, initial_state);
            let px = if x_bit == 0 { p_l } else { 1.0 - p_l };
            p *= px * kernels[x_bit].rows()[y_prev][y_bit];
            if p == 0.0 {
                break;
            }
        }
        probs[idx] = p;
    }
    JointTable {
        horizon: n,
        initial_state,
        probs,
    }
}

/// Builds the exact joint distribution realizing the causal factorization.
/// General-causal policies enumerate the full table (`n <= 10`); other
/// classes fall back to an implicit recursion handle for `11 <= n <= 24`.
pub fn build_joint(
    params: &ChannelParams,
    policy: &FeedbackPolicy,
    initial_state: ReceptorState,
    n: usize,
) -> Result<JointDistribution> {
    if n < 1 {
        return Err(Error::invalid("n", "horizon must be >= 1"));
    }
    policy.validate(n)?;
    if n <= GENERAL_CAUSAL_HORIZON_CAP {
        return Ok(JointDistribution::Table(enumerate_table(
            params,
            policy,
            initial_state,
            n,
        )));
    }
    if policy.class() == PolicyClass::GeneralCausal {
        return Err(Error::EnumerationBudget {
            requested: n,
            cap: GENERAL_CAUSAL_HORIZON_CAP,
            context: "general-causal joint enumeration",
        });
    }
    if n > MARKOV_HORIZON_CAP {
        return Err(Error::EnumerationBudget {
            requested: n,
            cap: MARKOV_HORIZON_CAP,
            context: "Markov-class joint recursion",
        });
    }
    Ok(JointDistribution::Implicit {
        params: *params,
        policy: policy.clone(),
        initial_state,
        horizon: n,
    })
}

/// Directed information with its per-step decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedInfoResult {
    pub total_bits: f64,
    pub per_term_bits: Vec<f64>,
    pub per_symbol_bits: f64,
}

impl DirectedInfoResult {
    fn from_terms(per_term_bits: Vec<f64>) -> Self {
        let total_bits: f64 = per_term_bits.iter().sum();
        let per_symbol_bits = total_bits / per_term_bits.len() as f64;
        DirectedInfoResult {
            total_bits,
            per_term_bits,
            per_symbol_bits,
        }
    }
}

fn di_from_table(table: &JointTable) -> DirectedInfoResult {
    let n = table.horizon;
    let ymask = (1usize << n) - 1;
    let mut per_term = Vec::with_capacity(n);
    for i in 1..=n {
        let shift = n - i;
        // Marginal over the length-i prefixes (x^i, y^i).
        let mut p_xy = vec![0.0f64; 1usize << (2 * i)];
        for (idx, &p) in table.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let xp = (idx >> n) >> shift;
            let yp = (idx & ymask) >> shift;
            p_xy[(xp << i) | yp] += p;
        }
        // Derived marginals: (x^i, y^{i-1}), y^i, y^{i-1}.
        let mut p_x_yprev = vec![0.0f64; 1usize << (2 * i - 1)];
        let mut p_y = vec![0.0f64; 1usize << i];
        let mut p_yprev = vec![0.0f64; 1usize << (i - 1)];
        for (j, &p) in p_xy.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let xp = j >> i;
            let yp = j & ((1usize << i) - 1);
            p_x_yprev[(xp << (i - 1)) | (yp >> 1)] += p;
            p_y[yp] += p;
            p_yprev[yp >> 1] += p;
        }
        let mut term = 0.0;
        for (j, &p) in p_xy.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let xp = j >> i;
            let yp = j & ((1usize << i) - 1);
            let num = p * p_yprev[yp >> 1];
            let den = p_x_yprev[(xp << (i - 1)) | (yp >> 1)] * p_y[yp];
            term += p * (num / den).log2();
        }
        per_term.push(term);
    }
    DirectedInfoResult::from_terms(per_term)
}

fn markov_recursion(
    params: &ChannelParams,
    policy: &FeedbackPolicy,
    mut mu: [f64; 2],
    n: usize,
) -> DirectedInfoResult {
    let a_l = params.alpha_l();
    let a_h = params.alpha_h();
    let beta = params.beta();
    let mut per_term = Vec::with_capacity(n);
    for i in 1..=n {
        let (p_u, _p_b) = policy.step_pair(i).expect("Markov-class policy");
        let alpha_bar = a_h * (1.0 - p_u) + a_l * p_u;
        // Only the unbound state carries information; the bound row of the
        // kernel is input-independent.
        let term = mu[0] * (h2(alpha_bar) - (p_u * h2(a_l) + (1.0 - p_u) * h2(a_h)));
        per_term.push(term);
        mu = [
            mu[0] * (1.0 - alpha_bar) + mu[1] * beta,
            mu[0] * alpha_bar + mu[1] * (1.0 - beta),
        ];
    }
    DirectedInfoResult::from_terms(per_term)
}

/// Directed information over horizon `n`. General-causal policies go
/// through the full-joint enumeration (`n <= 10`); previous-output,
/// stationary, and iid policies use the Markov recursion (`n <= 24`).
pub fn directed_information(
    params: &ChannelParams,
    policy: &FeedbackPolicy,
    initial_state: ReceptorState,
    n: usize,
) -> Result<DirectedInfoResult> {
    if n < 1 {
        return Err(Error::invalid("n", "horizon must be >= 1"));
    }
    policy.validate(n)?;
    match policy.class() {
        PolicyClass::GeneralCausal => {
            if n > GENERAL_CAUSAL_HORIZON_CAP {
                return Err(Error::EnumerationBudget {
                    requested: n,
                    cap: GENERAL_CAUSAL_HORIZON_CAP,
                    context: "general-causal joint enumeration",
                });
            }
            Ok(di_from_table(&enumerate_table(params, policy, initial_state, n)))
        }
        _ => {
            if n > MARKOV_HORIZON_CAP {
                return Err(Error::EnumerationBudget {
                    requested: n,
                    cap: MARKOV_HORIZON_CAP,
                    context: "Markov-class recursion",
                });
            }
            let mut mu = [0.0; 2];
            mu[initial_state.index()] = 1.0;
            Ok(markov_recursion(params, policy, mu, n))
        }
    }
}

/// Directed information via the full-joint enumeration for any policy
/// class (`n <= 10`). Used as the independent oracle for the recursion.
pub fn directed_information_enumerated(
    params: &ChannelParams,
    policy: &FeedbackPolicy,
    initial_state: ReceptorState,
    n: usize,
) -> Result<DirectedInfoResult> {
    if n < 1 {
        return Err(Error::invalid("n", "horizon must be >= 1"));
    }
    if n > GENERAL_CAUSAL_HORIZON_CAP {
        return Err(Error::EnumerationBudget {
            requested: n,
            cap: GENERAL_CAUSAL_HORIZON_CAP,
            context: "joint enumeration",
        });
    }
    policy.validate(n)?;
    Ok(di_from_table(&enumerate_table(params, policy, initial_state, n)))
}

/// Initial condition for rate estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DiInit {
    /// Point mass on a receptor state.
    State(ReceptorState),
    /// The stationary distribution of the policy's aggregated kernel.
    Stationary,
}

/// Per-symbol directed-information rate diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiRate {
    /// Cesaro average `total / n`.
    pub cesaro_bits_per_step: f64,
    /// The final term `I(X^n; Y_n | Y^{n-1})`; for stationary policies it
    /// converges geometrically to the closed-form rate.
    pub final_term_bits: f64,
}

/// Rate estimate for stationary-class (stationary or iid) policies.
pub fn di_rate_estimate(
    params: &ChannelParams,
    policy: &FeedbackPolicy,
    init: DiInit,
    n: usize,
) -> Result<DiRate> {
    match policy.class() {
        PolicyClass::Stationary | PolicyClass::Iid => {}
        _ => {
            return Err(Error::invalid(
                "policy",
                "rate estimate requires a stationary or iid policy",
            ))
        }
    }
    if n < 2 {
        return Err(Error::invalid("n", "horizon must be >= 2"));
    }
    if n > MARKOV_HORIZON_CAP {
        return Err(Error::EnumerationBudget {
            requested: n,
            cap: MARKOV_HORIZON_CAP,
            context: "Markov-class recursion",
        });
    }
    policy.validate(n)?;
    let mu = match init {
        DiInit::State(s) => {
            let mut mu = [0.0; 2];
            mu[s.index()] = 1.0;
            mu
        }
        DiInit::Stationary => {
            let (p_u, _) = policy.step_pair(1).expect("stationary-class policy");
            let agg = crate::channel::aggregated_kernel(params, p_u)?;
            crate::markov::stationary_distribution(&agg.kernel)?.as_array()
        }
    };
    let di = markov_recursion(params, policy, mu, n);
    Ok(DiRate {
        cesaro_bits_per_step: di.per_symbol_bits,
        final_term_bits: *di.per_term_bits.last().unwrap(),
    })
}

/// Maximum absolute deviation of total directed information across
/// bound-state schedules, with the unbound-state schedule held fixed.
/// Computed through the full-joint enumeration so that the bound-state
/// parameters genuinely enter the computation.
pub fn lemma2_flatness(
    params: &ChannelParams,
    u_schedule: &[f64],
    b_grid: &[Vec<f64>],
    initial_state: ReceptorState,
    n: usize,
) -> Result<f64> {
    if u_schedule.len() < n {
        return Err(Error::invalid("u_schedule", format!("needs {n} entries")));
    }
    if b_grid.is_empty() {
        return Err(Error::invalid("b_grid", "needs at least one schedule"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b_schedule in b_grid {
        if b_schedule.len() < n {
            return Err(Error::invalid("b_grid", format!("schedules need {n} entries")));
        }
        let policy = FeedbackPolicy::PrevOutputOnly(crate::directed::policy::PrevOutputPolicy {
            first_p_l: u_schedule[0],
            steps: (1..n).map(|i| (u_schedule[i], b_schedule[i])).collect(),
        });
        let di = directed_information_enumerated(params, &policy, initial_state, n)?;
        lo = lo.min(di.total_bits);
        hi = hi.max(di.total_bits);
    }
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::policy::{GeneralCausalPolicy, PrevOutputPolicy};
    use ConcentrationSymbol::{H, L};
    use ReceptorState::{B, U};

    fn p(a: f64, b: f64, c: f64) -> ChannelParams {
        ChannelParams::new(a, b, c).unwrap()
    }

    fn table(j: JointDistribution) -> JointTable {
        match j {
            JointDistribution::Table(t) => t,
            _ => panic!("expected explicit table"),
        }
    }

    #[test]
    fn joint_single_step() {
        let params = p(0.1, 0.9, 0.5);
        let policy = FeedbackPolicy::Iid { p_l: 0.3 };
        let t = table(build_joint(&params, &policy, U, 1).unwrap());
        // P(x=L, y=U) = 0.3 * 0.9, etc.
        assert!((t.prob(0, 0) - 0.3 * 0.9).abs() < 1e-15);
        assert!((t.prob(0, 1) - 0.3 * 0.1).abs() < 1e-15);
        assert!((t.prob(1, 0) - 0.7 * 0.1).abs() < 1e-15);
        assert!((t.prob(1, 1) - 0.7 * 0.9).abs() < 1e-15);
        assert!((t.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_deterministic_policy_support() {
        let params = p(0.1, 0.9, 0.5);
        let policy = FeedbackPolicy::Iid { p_l: 0.0 }; // always H
        let t = table(build_joint(&params, &policy, U, 3).unwrap());
        for x_idx in 0..8 {
            for y_idx in 0..8 {
                if x_idx != 0b111 {
                    assert_eq!(t.prob(x_idx, y_idx), 0.0);
                }
            }
        }
        assert!((t.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_hand_product() {
        // x^2 = HL, y^2 = BU from initial U:
        // 0.5 (x1=H) * 0.9 (U->B under H) * 0.5 (x2=L) * 0.5 (B->U).
        let params = p(0.1, 0.9, 0.5);
        let policy = FeedbackPolicy::Iid { p_l: 0.5 };
        let t = table(build_joint(&params, &policy, U, 2).unwrap());
        assert_eq!(t.probs.len(), 16);
        let x_idx = 0b10; // H then L
        let y_idx = 0b10; // B then U
        assert!((t.prob(x_idx, y_idx) - 0.5 * 0.9 * 0.5 * 0.5).abs() < 1e-15);
        assert!((t.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn joint_budget_errors() {
        let params = p(0.1, 0.9, 0.5);
        let gc = FeedbackPolicy::GeneralCausal(GeneralCausalPolicy {
            steps: (0..11).map(|i| vec![0.5; 1 << (2 * i)]).collect(),
        });
        assert!(matches!(
            build_joint(&params, &gc, U, 11),
            Err(Error::EnumerationBudget { cap: 10, .. })
        ));
        let iid = FeedbackPolicy::Iid { p_l: 0.5 };
        assert!(matches!(
            build_joint(&params, &iid, U, 12).unwrap(),
            JointDistribution::Implicit { horizon: 12, .. }
        ));
        assert!(matches!(
            build_joint(&params, &iid, U, 25),
            Err(Error::EnumerationBudget { cap: 24, .. })
        ));
        assert!(build_joint(&params, &iid, U, 0).is_err());
    }

    #[test]
    fn di_single_step_from_bound_state_is_zero() {
        let params = p(0.2, 0.8, 0.3);
        for policy in [
            FeedbackPolicy::Iid { p_l: 0.4 },
            FeedbackPolicy::Stationary {
                p_l_given_u: 0.2,
                p_l_given_b: 0.9,
            },
        ] {
            let di = directed_information(&params, &policy, B, 1).unwrap();
            assert!(di.total_bits.abs() < 1e-14);
            let de = directed_information_enumerated(&params, &policy, B, 1).unwrap();
            assert!(de.total_bits.abs() < 1e-12);
        }
    }

    #[test]
    fn di_noiseless_single_step_is_one_bit() {
        let params = p(0.0, 1.0, 0.5);
        let policy = FeedbackPolicy::Iid { p_l: 0.5 };
        let di = directed_information(&params, &policy, U, 1).unwrap();
        assert!((di.total_bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recursion_matches_enumeration() {
        let params = p(0.1, 0.9, 0.5);
        let policy = FeedbackPolicy::Iid { p_l: 0.5 };
        for n in [1, 2, 5] {
            let a = directed_information(&params, &policy, U, n).unwrap();
            let b = directed_information_enumerated(&params, &policy, U, n).unwrap();
            assert!(
                (a.total_bits - b.total_bits).abs() < 1e-12,
                "n={n}: {} vs {}",
                a.total_bits,
                b.total_bits
            );
            for (ta, tb) in a.per_term_bits.iter().zip(&b.per_term_bits) {
                assert!((ta - tb).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn recursion_matches_enumeration_time_varying() {
        let params = p(0.25, 0.7, 0.45);
        let policy = FeedbackPolicy::PrevOutputOnly(PrevOutputPolicy {
            first_p_l: 0.8,
            steps: vec![(0.1, 0.6), (0.9, 0.2), (0.5, 0.5), (0.33, 0.77)],
        });
        for init in [U, B] {
            let a = directed_information(&params, &policy, init, 5).unwrap();
            let b = directed_information_enumerated(&params, &policy, init, 5).unwrap();
            assert!((a.total_bits - b.total_bits).abs() < 1e-12);
        }
    }

    #[test]
    fn terms_nonnegative_and_consistent() {
        let params = p(0.15, 0.85, 0.4);
        let policy = FeedbackPolicy::Stationary {
            p_l_given_u: 0.35,
            p_l_given_b: 0.9,
        };
        let di = directed_information(&params, &policy, U, 10).unwrap();
        for t in &di.per_term_bits {
            assert!(*t >= -1e-12);
        }
        let sum: f64 = di.per_term_bits.iter().sum();
        assert!((sum - di.total_bits).abs() < 1e-10);
        assert!((di.per_symbol_bits - di.total_bits / 10.0).abs() < 1e-14);
    }

    #[test]
    fn output_is_markov_under_prev_output_policy() {
        // p(y_i | y^{i-1}) from the joint equals p(y_i | y_{i-1}).
        let params = p(0.2, 0.75, 0.35);
        let policy = FeedbackPolicy::PrevOutputOnly(PrevOutputPolicy {
            first_p_l: 0.4,
            steps: vec![(0.15, 0.8), (0.6, 0.3), (0.25, 0.9)],
        });
        let n = 4;
        let t = table(build_joint(&params, &policy, U, n).unwrap());
        // Output marginal over y^n.
        let mut p_y = vec![0.0f64; 1 << n];
        for (idx, &q) in t.probs.iter().enumerate() {
            p_y[idx & ((1 << n) - 1)] += q;
        }
        for i in 2..=n {
            // Conditional p(y_i = B | y^{i-1}) must agree across histories
            // sharing the last output symbol.
            let mut by_last: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
            for hist in 0..(1usize << (i - 1)) {
                let mut mass = 0.0;
                let mut mass_b = 0.0;
                for rest in 0..(1usize << (n - i + 1)) {
                    let y_idx = (hist << (n - i + 1)) | rest;
                    let q = p_y[y_idx];
                    mass += q;
                    if (y_idx >> (n - i)) & 1 == 1 {
                        mass_b += q;
                    }
                }
                if mass > 1e-12 {
                    by_last[hist & 1].push(mass_b / mass);
                }
            }
            for conds in &by_last {
                for w in conds.windows(2) {
                    assert!((w[0] - w[1]).abs() < 1e-12, "step {i}: {:?}", conds);
                }
            }
        }
    }

    #[test]
    fn rate_estimate_stationary_init_matches_closed_form() {
        let params = p(0.1, 0.9, 0.5);
        for p_h in [0.2, 0.5, 0.381966] {
            let policy = FeedbackPolicy::Iid { p_l: 1.0 - p_h };
            let closed = crate::iid::iid_rate(&params, p_h).unwrap();
            for n in [2, 5, 12] {
                let r = di_rate_estimate(&params, &policy, DiInit::Stationary, n).unwrap();
                assert!(
                    (r.final_term_bits - closed).abs() < 1e-10,
                    "n={n}, p_h={p_h}"
                );
            }
        }
    }

    #[test]
    fn rate_estimate_final_term_converges_from_point_mass() {
        let params = p(0.1, 0.9, 0.5);
        let policy = FeedbackPolicy::Iid { p_l: 0.5 };
        let closed = crate::iid::iid_rate(&params, 0.5).unwrap();
        let gaps: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| {
                let r = di_rate_estimate(&params, &policy, DiInit::State(U), n).unwrap();
                (r.final_term_bits - closed).abs()
            })
            .collect();
        assert!(gaps[1] < gaps[0] || gaps[1] < 1e-12);
        assert!(gaps[2] < 1e-8);
    }

    #[test]
    fn rate_estimate_uninformative_and_validation() {
        let flat = p(0.3, 0.3, 0.4);
        let policy = FeedbackPolicy::Iid { p_l: 0.5 };
        let r = di_rate_estimate(&flat, &policy, DiInit::State(U), 8).unwrap();
        assert!(r.cesaro_bits_per_step.abs() < 1e-14);
        assert!(r.final_term_bits.abs() < 1e-14);

        let params = p(0.1, 0.9, 0.5);
        let prev = FeedbackPolicy::PrevOutputOnly(PrevOutputPolicy {
            first_p_l: 0.5,
            steps: vec![(0.5, 0.5)],
        });
        assert!(di_rate_estimate(&params, &prev, DiInit::State(U), 2).is_err());
        assert!(di_rate_estimate(&params, &policy, DiInit::State(U), 1).is_err());
    }

    #[test]
    fn near_golden_rate_approaches_log_phi() {
        let eps = 1e-4;
        let params = p(eps, 1.0 - eps, 1.0 - eps);
        let policy = FeedbackPolicy::Iid {
            p_l: 1.0 - 0.381966,
        };
        let r = di_rate_estimate(&params, &policy, DiInit::Stationary, 24).unwrap();
        assert!((r.final_term_bits - 0.6942419136306173).abs() < 2e-3);
    }

    #[test]
    fn flatness_examples() {
        let params = p(0.2, 0.7, 0.45);
        let n = 6;
        let u: Vec<f64> = vec![0.3, 0.6, 0.1, 0.8, 0.5, 0.25];
        let b_grid = vec![
            vec![0.0; n],
            vec![1.0; n],
            vec![0.5; n],
            vec![0.9, 0.1, 0.7, 0.3, 0.2, 0.6],
        ];
        let dev = lemma2_flatness(&params, &u, &b_grid, U, n).unwrap();
        assert!(dev < 1e-10, "deviation {dev}");

        let flat = p(0.3, 0.3, 0.45);
        let dev = lemma2_flatness(&flat, &u, &b_grid, U, n).unwrap();
        assert!(dev < 1e-14);

        let dev = lemma2_flatness(&params, &[0.5], &[vec![0.1], vec![0.9]], B, 1).unwrap();
        assert!(dev < 1e-14);
    }

    #[test]
    fn general_causal_policy_enumerates() {
        // A 2-step general-causal policy that mimics an iid law must give
        // the iid answer.
        let params = p(0.1, 0.9, 0.5);
        let gc = FeedbackPolicy::GeneralCausal(GeneralCausalPolicy {
            steps: vec![vec![0.5], vec![0.5; 4]],
        });
        let iid = FeedbackPolicy::Iid { p_l: 0.5 };
        let a = directed_information(&params, &gc, U, 2).unwrap();
        let b = directed_information(&params, &iid, U, 2).unwrap();
        assert!((a.total_bits - b.total_bits).abs() < 1e-12);
    }

    #[test]
    fn trajectory_inputs_do_not_affect_bound_rows() {
        // sanity: kernels used by the enumeration
        let params = p(0.3, 0.6, 0.2);
        assert_eq!(
            kernel_for_input(&params, L).row(B),
            kernel_for_input(&params, H).row(B)
        );
    }
}
