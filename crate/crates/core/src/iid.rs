//! Closed-form iid mutual-information rate, its maximization, parameter
//! sweeps, and the golden-ratio capacity-limit study.

use crate::channel::ChannelParams;
use crate::error::{check_probability, Error, Result};
use crate::markov::h2;
use crate::opt::grid_then_golden_max;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Grid step of the coarse scan that brackets the global maximum before
/// golden-section refinement.
const COARSE_STEP: f64 = 1e-3;

pub const DEGENERATE_ABSORBING: &str = "degenerate: absorbing bound state";

/// Result of maximizing the iid rate over the input distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub value_bits_per_step: f64,
    pub argmax_p_h: f64,
    pub optimizer_evals: u64,
    pub bracket_width: f64,
}

pub(crate) fn iid_rate_unchecked(params: &ChannelParams, p_h: f64) -> f64 {
    if params.alpha_l() == params.alpha_h() {
        // Identical columns carry no information; short-circuiting keeps
        // the flat objective exactly zero instead of rounding noise.
        return 0.0;
    }
    let p_l = 1.0 - p_h;
    let alpha_bar = params.alpha_h() * p_h + params.alpha_l() * p_l;
    let numerator = h2(alpha_bar) - p_h * h2(params.alpha_h()) - p_l * h2(params.alpha_l());
    if numerator <= 0.0 {
        // Concavity makes the numerator nonnegative up to rounding.
        return 0.0;
    }
    if params.beta() == 0.0 {
        // The display's denominator diverges; the limit is 0.
        return 0.0;
    }
    numerator / (1.0 + alpha_bar / params.beta())
}

/// The closed-form iid rate in bits per step:
/// `[H(abar) - p_H H(alpha_H) - p_L H(alpha_L)] / (1 + abar / beta)` with
/// `abar = alpha_H p_H + alpha_L p_L`.
pub fn iid_rate(params: &ChannelParams, p_h: f64) -> Result<f64> {
    check_probability("p_h", p_h)?;
    Ok(iid_rate_unchecked(params, p_h))
}

/// Returns the rate together with a diagnostic for the `beta = 0`
/// degenerate case (absorbing bound state), which is reported rather than
/// treated as an error so parameter sweeps can include the boundary.
pub fn iid_rate_with_diagnostic(
    params: &ChannelParams,
    p_h: f64,
) -> Result<(f64, Option<&'static str>)> {
    let rate = iid_rate(params, p_h)?;
    let note = if params.beta() == 0.0 && params.alpha_h() > 0.0 {
        Some(DEGENERATE_ABSORBING)
    } else {
        None
    };
    Ok((rate, note))
}

/// Global maximum of the iid rate over `p_H` in `[0, 1]`: coarse grid scan
/// to bracket, then golden-section refinement to `bracket_width <= tol`.
/// A flat (identically zero) objective reports `argmax = 0.5`.
pub fn maximize_iid(params: &ChannelParams, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let f = |p: f64| iid_rate_unchecked(params, p);
    let r = grid_then_golden_max(f, COARSE_STEP, tol);
    if r.fx <= 0.0 {
        // Flat-objective tie rule.
        return Ok(CapacityResult {
            value_bits_per_step: 0.0,
            argmax_p_h: 0.5,
            optimizer_evals: r.evals,
            bracket_width: 0.0,
        });
    }
    Ok(CapacityResult {
        value_bits_per_step: f(r.x),
        argmax_p_h: r.x,
        optimizer_evals: r.evals,
        bracket_width: r.bracket_width,
    })
}

/// One row of the golden-ratio limit study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldenLimitRow {
    pub epsilon: f64,
    pub capacity_bits_per_step: f64,
    pub argmax_p_h: f64,
}

/// Evaluates the capacity along `(alpha_L, alpha_H, beta) =
/// (eps, 1 - eps, 1 - eps)`. As `eps` shrinks, the channel approaches the
/// golden-mean-shift regime with capacity `log2(phi)` at
/// `p_H = 2 - phi`.
pub fn golden_limit_study(epsilon_schedule: &[f64]) -> Result<Vec<GoldenLimitRow>> {
    let mut rows = Vec::with_capacity(epsilon_schedule.len());
    for &eps in epsilon_schedule {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::invalid("epsilon", format!("{eps} not in (0, 0.5)")));
        }
        let params = ChannelParams::new(eps, 1.0 - eps, 1.0 - eps)?;
        let r = maximize_iid(&params, 1e-10)?;
        rows.push(GoldenLimitRow {
            epsilon: eps,
            capacity_bits_per_step: r.value_bits_per_step,
            argmax_p_h: r.argmax_p_h,
        });
    }
    Ok(rows)
}

/// One row of a capacity sweep; invalid parameter combinations are flagged
/// rather than dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_l: f64,
    pub alpha_h: f64,
    pub beta: f64,
    pub result: Option<CapacityResult>,
    pub note: Option<String>,
}

/// Capacity over the cartesian grid, rows in lexicographic order
/// `(alpha_L, alpha_H, beta)` regardless of parallelism.
pub fn capacity_sweep(
    alpha_l_values: &[f64],
    alpha_h_values: &[f64],
    beta_values: &[f64],
    tol: f64,
) -> Result<Vec<SweepRow>> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let mut grid = Vec::new();
    for &a_l in alpha_l_values {
        for &a_h in alpha_h_values {
            for &b in beta_values {
                grid.push((a_l, a_h, b));
            }
        }
    }
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&(a_l, a_h, b)| match ChannelParams::new(a_l, a_h, b) {
            Ok(params) => {
                let result = maximize_iid(&params, tol).expect("tol validated");
                let note = if b == 0.0 && a_h > 0.0 {
                    Some(DEGENERATE_ABSORBING.to_string())
                } else {
                    None
                };
                SweepRow {
                    alpha_l: a_l,
                    alpha_h: a_h,
                    beta: b,
                    result: Some(result),
                    note,
                }
            }
            Err(e) => SweepRow {
                alpha_l: a_l,
                alpha_h: a_h,
                beta: b,
                result: None,
                note: Some(format!("skipped: {e}")),
            },
        })
        .collect();
    Ok(rows)
}
