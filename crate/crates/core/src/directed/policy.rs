//! Causal feedback input laws, from fully general to iid.

use crate::channel::ReceptorState;
use crate::error::{check_probability, Error, Result};
use serde::{Deserialize, Serialize};

/// The nested policy classes: general causal conditioning on all past
/// inputs and outputs, conditioning on the previous output only
/// (time-varying), the stationary previous-output law, and iid inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyClass {
    GeneralCausal,
    PrevOutputOnly,
    Stationary,
    Iid,
}

/// Per-step maps from the full `(x, y)` history to `P(X_i = L)`.
///
/// `steps[i - 1]` is the table for step `i` (1-based), indexed by
/// `(x_hist << (i - 1)) | y_hist` where `x_hist` and `y_hist` are the
/// `i - 1` history bits (earliest symbol in the highest bit; `H`/`B` = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralCausalPolicy {
    pub steps: Vec<Vec<f64>>,
}

/// Time-varying previous-output-only law: a first-symbol probability plus
/// pairs `(p_L_given_U, p_L_given_B)` for steps `2..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevOutputPolicy {
    pub first_p_l: f64,
    pub steps: Vec<(f64, f64)>,
}

/// A causal input law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeedbackPolicy {
    GeneralCausal(GeneralCausalPolicy),
    PrevOutputOnly(PrevOutputPolicy),
    /// Single pair `(p_L_given_U, p_L_given_B)`; the first-symbol law is
    /// the pair applied to the initial state, so setting both components
    /// equal makes the input exactly iid at every step.
    Stationary { p_l_given_u: f64, p_l_given_b: f64 },
    Iid { p_l: f64 },
}

impl FeedbackPolicy {
    pub fn class(&self) -> PolicyClass {
        match self {
            FeedbackPolicy::GeneralCausal(_) => PolicyClass::GeneralCausal,
            FeedbackPolicy::PrevOutputOnly(_) => PolicyClass::PrevOutputOnly,
            FeedbackPolicy::Stationary { .. } => PolicyClass::Stationary,
            FeedbackPolicy::Iid { .. } => PolicyClass::Iid,
        }
    }

    /// Checks that every probability is in `[0, 1]` and that per-step
    /// tables cover horizon `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            FeedbackPolicy::GeneralCausal(p) => {
                if p.steps.len() < n {
                    return Err(Error::invalid(
                        "policy",
                        format!("general-causal policy has {} steps, horizon is {n}", p.steps.len()),
                    ));
                }
                for (i, table) in p.steps.iter().enumerate().take(n) {
                    let want = 1usize << (2 * i);
                    if table.len() != want {
                        return Err(Error::invalid(
                            "policy",
                            format!("step {} table has {} entries, expected {want}", i + 1, table.len()),
                        ));
                    }
                    for &q in table {
                        check_probability("policy entry", q)?;
                    }
                }
            }
            FeedbackPolicy::PrevOutputOnly(p) => {
                check_probability("first_p_l", p.first_p_l)?;
                if n >= 2 && p.steps.len() < n - 1 {
                    return Err(Error::invalid(
                        "policy",
                        format!(
                            "previous-output policy has {} step pairs, horizon {n} needs {}",
                            p.steps.len(),
                            n - 1
                        ),
                    ));
                }
                for &(u, b) in p.steps.iter().take(n.saturating_sub(1)) {
                    check_probability("p_l_given_u", u)?;
                    check_probability("p_l_given_b", b)?;
                }
            }
            FeedbackPolicy::Stationary {
                p_l_given_u,
                p_l_given_b,
            } => {
                check_probability("p_l_given_u", *p_l_given_u)?;
                check_probability("p_l_given_b", *p_l_given_b)?;
            }
            FeedbackPolicy::Iid { p_l } => check_probability("p_l", *p_l)?,
        }
        Ok(())
    }

    /// `P(X_i = L)` given the history bits. `x_hist` and `y_hist` hold the
    /// `i - 1` past symbols, earliest in the highest bit.
    pub(crate) fn p_l(
        &self,
        step: usize, // 1-based
        x_hist: usize,
        y_hist: usize,
        initial_state: ReceptorState,
    ) -> f64 {
        let hist_len = step - 1;
        match self {
            FeedbackPolicy::GeneralCausal(p) => p.steps[step - 1][(x_hist << hist_len) | y_hist],
            FeedbackPolicy::PrevOutputOnly(p) => {
                if step == 1 {
                    p.first_p_l
                } else {
                    let (u, b) = p.steps[step - 2];
                    if y_hist & 1 == 0 {
                        u
                    } else {
                        b
                    }
                }
            }
            FeedbackPolicy::Stationary {
                p_l_given_u,
                p_l_given_b,
            } => {
                let prev_is_b = if step == 1 {
                    initial_state == ReceptorState::B
                } else {
                    y_hist & 1 == 1
                };
                if prev_is_b {
                    *p_l_given_b
                } else {
                    *p_l_given_u
                }
            }
            FeedbackPolicy::Iid { p_l } => *p_l,
        }
    }

    /// The step's `(p_L_given_U, p_L_given_B)` pair for Markov-class
    /// policies; `None` for general causal policies.
    pub(crate) fn step_pair(&self, step: usize) -> Option<(f64, f64)> {
        match self {
            FeedbackPolicy::GeneralCausal(_) => None,
            FeedbackPolicy::PrevOutputOnly(p) => {
                if step == 1 {
                    Some((p.first_p_l, p.first_p_l))
                } else {
                    Some(p.steps[step - 2])
                }
            }
            FeedbackPolicy::Stationary {
                p_l_given_u,
                p_l_given_b,
            } => Some((*p_l_given_u, *p_l_given_b)),
            FeedbackPolicy::Iid { p_l } => Some((*p_l, *p_l)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReceptorState::{B, U};

    #[test]
    fn validation() {
        let iid = FeedbackPolicy::Iid { p_l: 0.5 };
        assert!(iid.validate(5).is_ok());
        assert!(FeedbackPolicy::Iid { p_l: 1.5 }.validate(1).is_err());

        let prev = FeedbackPolicy::PrevOutputOnly(PrevOutputPolicy {
            first_p_l: 0.2,
            steps: vec![(0.1, 0.9)],
        });
        assert!(prev.validate(2).is_ok());
        assert!(prev.validate(3).is_err());

        let gc = FeedbackPolicy::GeneralCausal(GeneralCausalPolicy {
            steps: vec![vec![0.5], vec![0.1, 0.2, 0.3, 0.4]],
        });
        assert!(gc.validate(2).is_ok());
        assert!(gc.validate(3).is_err());
        let bad = FeedbackPolicy::GeneralCausal(GeneralCausalPolicy {
            steps: vec![vec![0.5], vec![0.1, 0.2]],
        });
        assert!(bad.validate(2).is_err());
    }

    #[test]
    fn stationary_first_symbol_uses_initial_state() {
        let pol = FeedbackPolicy::Stationary {
            p_l_given_u: 0.2,
            p_l_given_b: 0.8,
        };
        assert_eq!(pol.p_l(1, 0, 0, U), 0.2);
        assert_eq!(pol.p_l(1, 0, 0, B), 0.8);
        // later steps condition on the last output bit
        assert_eq!(pol.p_l(3, 0b01, 0b01, U), 0.8);
        assert_eq!(pol.p_l(3, 0b01, 0b10, U), 0.2);
    }

    #[test]
    fn prev_output_indexing() {
        let pol = FeedbackPolicy::PrevOutputOnly(PrevOutputPolicy {
            first_p_l: 0.3,
            steps: vec![(0.1, 0.9), (0.2, 0.7)],
        });
        assert_eq!(pol.p_l(1, 0, 0, U), 0.3);
        assert_eq!(pol.p_l(2, 0, 0b1, U), 0.9);
        assert_eq!(pol.p_l(3, 0b11, 0b10, U), 0.2);
        assert_eq!(pol.p_l(3, 0b11, 0b01, U), 0.7);
        assert_eq!(pol.step_pair(3), Some((0.2, 0.7)));
    }
}
