//! Maximization of directed information over each policy class.
//!
//! Every class is reduced to a parameter vector in `[0, 1]^d`. Small
//! search spaces are scanned exhaustively on the grid (lexicographic
//! order, first maximizer kept); larger ones use coordinate ascent from a
//! seed expanded out of the next-smaller class's optimum, which keeps the
//! class hierarchy monotone by construction. General-causal policies are
//! searched through their output-history tables: conditioning on past
//! inputs cannot change the joint law of `(X_i, Y^i)` beyond what the
//! output history already determines, so the reduced table attains the
//! same optimum.

use crate::channel::{ChannelParams, ReceptorState};
use crate::directed::joint::directed_information;
use crate::directed::policy::{
    FeedbackPolicy, GeneralCausalPolicy, PolicyClass, PrevOutputPolicy,
};
use crate::error::{Error, Result};
use crate::opt::golden_section_max;
use serde::{Deserialize, Serialize};

/// Horizon cap for general-causal search (the parameter count is
/// `2^n - 1` and each evaluation enumerates the full joint).
pub const GENERAL_CAUSAL_SEARCH_CAP: usize = 4;

/// Grid-point budget above which the exhaustive scan gives way to
/// coordinate ascent.
const EXHAUSTIVE_BUDGET: u64 = 300_000;

const MAX_SWEEPS: usize = 100;

/// Result of a policy-class maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySearch {
    pub policy: FeedbackPolicy,
    pub per_symbol_bits: f64,
    pub evals: u64,
}

fn dim_for(class: PolicyClass, n: usize) -> usize {
    match class {
        PolicyClass::Iid => 1,
        PolicyClass::Stationary => 2,
        PolicyClass::PrevOutputOnly => 2 * n - 1,
        PolicyClass::GeneralCausal => (1usize << n) - 1,
    }
}

/// Expands a parameter vector into a policy. General-causal vectors hold
/// the concatenated per-step output-history tables (step `i` contributes
/// `2^{i-1}` entries); the full table replicates them across input
/// histories.
fn vec_to_policy(class: PolicyClass, v: &[f64], n: usize) -> FeedbackPolicy {
    match class {
        PolicyClass::Iid => FeedbackPolicy::Iid { p_l: v[0] },
        PolicyClass::Stationary => FeedbackPolicy::Stationary {
            p_l_given_u: v[0],
            p_l_given_b: v[1],
        },
        PolicyClass::PrevOutputOnly => FeedbackPolicy::PrevOutputOnly(PrevOutputPolicy {
            first_p_l: v[0],
            steps: (0..n - 1).map(|i| (v[1 + 2 * i], v[2 + 2 * i])).collect(),
        }),
        PolicyClass::GeneralCausal => {
            let mut steps = Vec::with_capacity(n);
            let mut offset = 0usize;
            for i in 0..n {
                let y_entries = 1usize << i;
                let mut table = vec![0.0; 1usize << (2 * i)];
                for (idx, slot) in table.iter_mut().enumerate() {
                    *slot = v[offset + (idx & (y_entries - 1))];
                }
                offset += y_entries;
                steps.push(table);
            }
            FeedbackPolicy::GeneralCausal(GeneralCausalPolicy { steps })
        }
    }
}

/// Seed vector for `class` expanded from the optimum of the next-smaller
/// class, evaluating to the same directed information.
fn expand_seed(
    class: PolicyClass,
    inner: &[f64],
    n: usize,
    initial_state: ReceptorState,
) -> Vec<f64> {
    match class {
        PolicyClass::Iid => inner.to_vec(),
        PolicyClass::Stationary => vec![inner[0], inner[0]],
        PolicyClass::PrevOutputOnly => {
            let (u, b) = (inner[0], inner[1]);
            let first = if initial_state == ReceptorState::U { u } else { b };
            let mut v = vec![first];
            for _ in 1..n {
                v.push(u);
                v.push(b);
            }
            v
        }
        PolicyClass::GeneralCausal => {
            let mut v = vec![inner[0]];
            for i in 1..n {
                let (u, b) = (inner[1 + 2 * (i - 1)], inner[2 + 2 * (i - 1)]);
                for h in 0..(1usize << i) {
                    v.push(if h & 1 == 0 { u } else { b });
                }
            }
            v
        }
    }
}

struct Searcher<'a> {
    params: &'a ChannelParams,
    class: PolicyClass,
    initial_state: ReceptorState,
    n: usize,
    evals: u64,
}

impl Searcher<'_> {
    fn eval(&mut self, v: &[f64]) -> f64 {
        self.evals += 1;
        let policy = vec_to_policy(self.class, v, self.n);
        directed_information(self.params, &policy, self.initial_state, self.n)
            .expect("search stays within validated bounds")
            .per_symbol_bits
    }

    fn exhaustive(&mut self, dim: usize, g: usize) -> (Vec<f64>, f64) {
        let mut idx = vec![0usize; dim];
        let mut best_v = vec![0.0; dim];
        let mut best = self.eval(&best_v);
        let mut v = vec![0.0; dim];
        loop {
            // Lexicographic odometer over {0..=g}^dim.
            let mut pos = dim;
            while pos > 0 {
                pos -= 1;
                if idx[pos] < g {
                    idx[pos] += 1;
                    for k in pos + 1..dim {
                        idx[k] = 0;
                    }
                    break;
                }
                if pos == 0 {
                    return (best_v, best);
                }
            }
            for (slot, &i) in v.iter_mut().zip(&idx) {
                *slot = i as f64 / g as f64;
            }
            let fx = self.eval(&v);
            if fx > best {
                best = fx;
                best_v.copy_from_slice(&v);
            }
        }
    }

    fn coordinate_grid_ascent(&mut self, v: &mut Vec<f64>, g: usize) -> f64 {
        let mut best = self.eval(v);
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for d in 0..v.len() {
                let saved = v[d];
                let mut coord_best = best;
                let mut coord_x = saved;
                for i in 0..=g {
                    let x = i as f64 / g as f64;
                    v[d] = x;
                    let fx = self.eval(v);
                    if fx > coord_best {
                        coord_best = fx;
                        coord_x = x;
                    }
                }
                v[d] = coord_x;
                if coord_best > best {
                    best = coord_best;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        best
    }

    fn coordinate_golden_refine(&mut self, v: &mut Vec<f64>, mut best: f64) -> f64 {
        for _ in 0..30 {
            let before = best;
            for d in 0..v.len() {
                let params = self.params;
                let class = self.class;
                let init = self.initial_state;
                let n = self.n;
                let mut local = v.clone();
                let r = golden_section_max(
                    |x| {
                        local[d] = x;
                        let policy = vec_to_policy(class, &local, n);
                        directed_information(params, &policy, init, n)
                            .expect("search stays within validated bounds")
                            .per_symbol_bits
                    },
                    0.0,
                    1.0,
                    1e-10,
                );
                self.evals += r.evals;
                if r.fx > best {
                    best = r.fx;
                    v[d] = r.x;
                }
            }
            if best - before < 1e-13 {
                break;
            }
        }
        best
    }
}

/// Maximizes per-symbol directed information over the given policy class.
/// `grid_resolution` is the number of grid intervals per coordinate;
/// `refine` adds golden-section coordinate polish after the grid stage.
pub fn max_feedback_di(
    params: &ChannelParams,
    class: PolicyClass,
    initial_state: ReceptorState,
    n: usize,
    grid_resolution: usize,
    refine: bool,
) -> Result<PolicySearch> {
    if n < 1 {
        return Err(Error::invalid("n", "horizon must be >= 1"));
    }
    if grid_resolution < 1 {
        return Err(Error::invalid("grid_resolution", "must be >= 1"));
    }
    if class == PolicyClass::GeneralCausal && n > GENERAL_CAUSAL_SEARCH_CAP {
        return Err(Error::EnumerationBudget {
            requested: n,
            cap: GENERAL_CAUSAL_SEARCH_CAP,
            context: "general-causal policy search",
        });
    }
    if class != PolicyClass::GeneralCausal && n > super::MARKOV_HORIZON_CAP {
        return Err(Error::EnumerationBudget {
            requested: n,
            cap: super::MARKOV_HORIZON_CAP,
            context: "policy search",
        });
    }

    let dim = dim_for(class, n);
    let g = grid_resolution;
    let mut searcher = Searcher {
        params,
        class,
        initial_state,
        n,
        evals: 0,
    };

    let mut seed_evals = 0u64;
    let seed = match class {
        PolicyClass::Iid => None,
        PolicyClass::Stationary => {
            let inner = max_feedback_di(params, PolicyClass::Iid, initial_state, n, g, refine)?;
            seed_evals += inner.evals;
            let FeedbackPolicy::Iid { p_l } = inner.policy else { unreachable!() };
            Some(expand_seed(class, &[p_l], n, initial_state))
        }
        PolicyClass::PrevOutputOnly => {
            let inner =
                max_feedback_di(params, PolicyClass::Stationary, initial_state, n, g, refine)?;
            seed_evals += inner.evals;
            let FeedbackPolicy::Stationary {
                p_l_given_u,
                p_l_given_b,
            } = inner.policy
            else {
                unreachable!()
            };
            Some(expand_seed(class, &[p_l_given_u, p_l_given_b], n, initial_state))
        }
        PolicyClass::GeneralCausal => {
            let inner = max_feedback_di(
                params,
                PolicyClass::PrevOutputOnly,
                initial_state,
                n,
                g,
                refine,
            )?;
            seed_evals += inner.evals;
            let FeedbackPolicy::PrevOutputOnly(p) = inner.policy else { unreachable!() };
            let mut flat = vec![p.first_p_l];
            for &(u, b) in p.steps.iter().take(n - 1) {
                flat.push(u);
                flat.push(b);
            }
            Some(expand_seed(class, &flat, n, initial_state))
        }
    };

    let points = (g as u64 + 1).checked_pow(dim as u32);
    let (mut best_v, mut best) = if points.is_some_and(|p| p <= EXHAUSTIVE_BUDGET) {
        searcher.exhaustive(dim, g)
    } else {
        let mut v = seed.clone().unwrap_or_else(|| vec![0.5; dim]);
        let fx = searcher.coordinate_grid_ascent(&mut v, g);
        (v, fx)
    };

    if let Some(seed_v) = seed {
        let fx = searcher.eval(&seed_v);
        if fx > best {
            best = fx;
            best_v = seed_v;
        }
    }
    if refine {
        best = searcher.coordinate_golden_refine(&mut best_v, best);
    }

    Ok(PolicySearch {
        policy: vec_to_policy(class, &best_v, n),
        per_symbol_bits: best,
        evals: searcher.evals + seed_evals,
    })
}
