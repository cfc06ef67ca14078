//! The discrete-time two-state transduction channel.
//!
//! Input alphabet `{L, H}` (ligand concentration), output alphabet `{U, B}`
//! (receptor state). Binding `U -> B` has probability `alpha_L` or `alpha_H`
//! depending on the input; unbinding `B -> U` has probability `beta`,
//! independent of the input. State order is `(U, B)` everywhere.

use crate::error::{check_probability, Error, Result};
use crate::rng::CounterRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const ROW_SUM_TOL: f64 = 1e-12;

/// Input symbol: ligand concentration level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConcentrationSymbol {
    /// Low concentration.
    L,
    /// High concentration.
    H,
}

impl ConcentrationSymbol {
    pub const ALL: [ConcentrationSymbol; 2] = [ConcentrationSymbol::L, ConcentrationSymbol::H];

    pub fn index(self) -> usize {
        match self {
            ConcentrationSymbol::L => 0,
            ConcentrationSymbol::H => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            ConcentrationSymbol::L
        } else {
            ConcentrationSymbol::H
        }
    }
}

/// Output symbol: receptor state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReceptorState {
    /// Unbound; sensitive to the input.
    U,
    /// Bound; insensitive to the input.
    B,
}

impl ReceptorState {
    pub const ALL: [ReceptorState; 2] = [ReceptorState::U, ReceptorState::B];

    pub fn index(self) -> usize {
        match self {
            ReceptorState::U => 0,
            ReceptorState::B => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            ReceptorState::U
        } else {
            ReceptorState::B
        }
    }
}

/// The channel parameter triple `(alpha_L, alpha_H, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    alpha_l: f64,
    alpha_h: f64,
    beta: f64,
}

impl ChannelParams {
    /// Builds a validated parameter triple. Requires
    /// `0 <= alpha_L <= alpha_H <= 1` and `0 <= beta <= 1`; boundary values
    /// are accepted (near-boundary evaluation is needed for the golden-ratio
    /// limit study) and reported by [`ChannelParams::is_strict_interior`].
    pub fn new(alpha_l: f64, alpha_h: f64, beta: f64) -> Result<Self> {
        check_probability("alpha_l", alpha_l)?;
        check_probability("alpha_h", alpha_h)?;
        check_probability("beta", beta)?;
        if alpha_l > alpha_h {
            return Err(Error::invalid(
                "alpha_l",
                format!("alpha_l ({alpha_l}) must be <= alpha_h ({alpha_h}); binding is more likely at high concentration"),
            ));
        }
        Ok(ChannelParams {
            alpha_l,
            alpha_h,
            beta,
        })
    }

    pub fn alpha_l(&self) -> f64 {
        self.alpha_l
    }

    pub fn alpha_h(&self) -> f64 {
        self.alpha_h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Binding probability for the given input symbol.
    pub fn alpha(&self, x: ConcentrationSymbol) -> f64 {
        match x {
            ConcentrationSymbol::L => self.alpha_l,
            ConcentrationSymbol::H => self.alpha_h,
        }
    }

    /// True when all three parameters lie strictly in `(0, 1)`, the regime
    /// in which the feedback-capacity equality holds.
    pub fn is_strict_interior(&self) -> bool {
        let interior = |p: f64| p > 0.0 && p < 1.0;
        interior(self.alpha_l) && interior(self.alpha_h) && interior(self.beta)
    }
}

/// A 2x2 row-stochastic matrix over receptor states, row index = previous
/// state, column index = next state, order `(U, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionKernel {
    rows: [[f64; 2]; 2],
}

impl TransitionKernel {
    pub fn new(rows: [[f64; 2]; 2]) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            for &p in row {
                if !(0.0..=1.0).contains(&p) || p.is_nan() {
                    return Err(Error::invalid(
                        "kernel",
                        format!("entry {p} in row {i} is not in [0, 1]"),
                    ));
                }
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::invalid(
                    "kernel",
                    format!("row {i} sums to {s}, not 1"),
                ));
            }
        }
        Ok(TransitionKernel { rows })
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        self.rows
    }

    pub fn row(&self, y_prev: ReceptorState) -> [f64; 2] {
        self.rows[y_prev.index()]
    }

    /// Entry `P(y | y_prev)`.
    pub fn prob(&self, y_prev: ReceptorState, y: ReceptorState) -> f64 {
        self.rows[y_prev.index()][y.index()]
    }

    /// Propagates a distribution one step: `mu * P`.
    pub fn propagate(&self, mu: [f64; 2]) -> [f64; 2] {
        [
            mu[0] * self.rows[0][0] + mu[1] * self.rows[1][0],
            mu[0] * self.rows[0][1] + mu[1] * self.rows[1][1],
        ]
    }
}

/// The policy-averaged output kernel: binding rate `alpha_bar`, unbinding
/// rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatedKernel {
    pub alpha_bar: f64,
    pub kernel: TransitionKernel,
}

/// Input-conditioned transition kernel: row `U` is
/// `[1 - alpha(x), alpha(x)]`, row `B` is `[beta, 1 - beta]`.
pub fn kernel_for_input(params: &ChannelParams, x: ConcentrationSymbol) -> TransitionKernel {
    let a = params.alpha(x);
    TransitionKernel {
        rows: [[1.0 - a, a], [params.beta, 1.0 - params.beta]],
    }
}

/// The aggregated output kernel under an input law with
/// `P(X = L | Y_prev = U) = p_l_given_u`. The averaged binding rate is
/// `alpha_bar = alpha_H (1 - p) + alpha_L p`.
pub fn aggregated_kernel(params: &ChannelParams, p_l_given_u: f64) -> Result<AggregatedKernel> {
    check_probability("p_l_given_u", p_l_given_u)?;
    let alpha_bar = params.alpha_h * (1.0 - p_l_given_u) + params.alpha_l * p_l_given_u;
    Ok(AggregatedKernel {
        alpha_bar,
        kernel: TransitionKernel {
            rows: [
                [1.0 - alpha_bar, alpha_bar],
                [params.beta, 1.0 - params.beta],
            ],
        },
    })
}

/// The next-state distribution `(P(U), P(B))` for input `x` from state
/// `y_prev`.
pub fn step_distribution(
    params: &ChannelParams,
    x: ConcentrationSymbol,
    y_prev: ReceptorState,
) -> [f64; 2] {
    kernel_for_input(params, x).row(y_prev)
}

/// A sampled input/output path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub inputs: Vec<ConcentrationSymbol>,
    pub outputs: Vec<ReceptorState>,
    pub initial_state: ReceptorState,
    pub seed: u64,
}

fn step_sample(
    params: &ChannelParams,
    x: ConcentrationSymbol,
    y_prev: ReceptorState,
    u: f64,
) -> ReceptorState {
    let p_u = step_distribution(params, x, y_prev)[0];
    if u < p_u {
        ReceptorState::U
    } else {
        ReceptorState::B
    }
}

/// Forward-simulates the chain for the given input sequence. Deterministic
/// for a fixed seed.
pub fn sample_trajectory(
    params: &ChannelParams,
    inputs: &[ConcentrationSymbol],
    initial_state: ReceptorState,
    seed: u64,
) -> Result<Trajectory> {
    if inputs.is_empty() {
        return Err(Error::invalid("inputs", "input sequence must be nonempty"));
    }
    let rng = CounterRng::new(seed);
    let mut outputs = Vec::with_capacity(inputs.len());
    let mut y_prev = initial_state;
    for (i, &x) in inputs.iter().enumerate() {
        let y = step_sample(params, x, y_prev, rng.uniform(0, i as u64));
        outputs.push(y);
        y_prev = y;
    }
    Ok(Trajectory {
        inputs: inputs.to_vec(),
        outputs,
        initial_state,
        seed,
    })
}

/// Monte Carlo rate estimate with batch-means standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub bits_per_step: f64,
    pub std_error: f64,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    /// Conditioning events `(x, y_prev)` that were never observed.
    pub diagnostics: Vec<String>,
}

const BLOCKS_PER_TRIAL: usize = 8;

/// Transition counts indexed `[x][y_prev][y]`.
type Counts = [[[u64; 2]; 2]; 2];

fn merge(into: &mut Counts, from: &Counts) {
    for x in 0..2 {
        for yp in 0..2 {
            for y in 0..2 {
                into[x][yp][y] += from[x][yp][y];
            }
        }
    }
}

/// Plug-in estimate of `H(Y_i | Y_{i-1}) - H(Y_i | Y_{i-1}, X_i)` from
/// transition counts, with the `0 log 0 = 0` convention.
fn plugin_rate(counts: &Counts) -> f64 {
    let total: u64 = counts.iter().flatten().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let tot = total as f64;
    let mut h_y_given_prev = 0.0;
    for yp in 0..2 {
        for y in 0..2 {
            let n_ypy: u64 = (0..2).map(|x| counts[x][yp][y]).sum();
            let n_yp: u64 = (0..2).map(|x| counts[x][yp][0] + counts[x][yp][1]).sum();
            if n_ypy > 0 {
                let p = n_ypy as f64 / tot;
                h_y_given_prev -= p * (n_ypy as f64 / n_yp as f64).log2();
            }
        }
    }
    let mut h_y_given_prev_x = 0.0;
    for x in 0..2 {
        for yp in 0..2 {
            let n_xyp = counts[x][yp][0] + counts[x][yp][1];
            for y in 0..2 {
                let n = counts[x][yp][y];
                if n > 0 {
                    let p = n as f64 / tot;
                    h_y_given_prev_x -= p * (n as f64 / n_xyp as f64).log2();
                }
            }
        }
    }
    h_y_given_prev - h_y_given_prev_x
}

fn run_trial(
    params: &ChannelParams,
    p_h: f64,
    horizon: usize,
    trial: u64,
    rng: &CounterRng,
) -> [Counts; BLOCKS_PER_TRIAL] {
    let mut blocks = [[[[0u64; 2]; 2]; 2]; BLOCKS_PER_TRIAL];
    let input_stream = 2 * trial;
    let output_stream = 2 * trial + 1;
    let mut y_prev = ReceptorState::U;
    for i in 0..horizon {
        let x = if rng.uniform(input_stream, i as u64) < p_h {
            ConcentrationSymbol::H
        } else {
            ConcentrationSymbol::L
        };
        let y = step_sample(params, x, y_prev, rng.uniform(output_stream, i as u64));
        let block = (i * BLOCKS_PER_TRIAL / horizon).min(BLOCKS_PER_TRIAL - 1);
        blocks[block][x.index()][y_prev.index()][y.index()] += 1;
        y_prev = y;
    }
    blocks
}

/// Estimates the iid-input information rate empirically. Trajectories use
/// iid inputs with `P(H) = p_h` from the initial state `U`; the estimate is
/// the plug-in rate from pooled transition counts, and the standard error
/// comes from batch means over contiguous blocks. The result is bit-identical
/// for a fixed seed regardless of `workers`.
pub fn estimate_rate_mc(
    params: &ChannelParams,
    p_h: f64,
    horizon: usize,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<RateEstimate> {
    check_probability("p_h", p_h)?;
    if horizon < 2 {
        return Err(Error::invalid("horizon", "must be >= 2"));
    }
    if trials < 1 {
        return Err(Error::invalid("trials", "must be >= 1"));
    }
    let rng = CounterRng::new(seed);
    let all_blocks: Vec<[Counts; BLOCKS_PER_TRIAL]> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        pool.install(|| {
            (0..trials as u64)
                .into_par_iter()
                .map(|t| run_trial(params, p_h, horizon, t, &rng))
                .collect()
        })
    } else {
        (0..trials as u64)
            .map(|t| run_trial(params, p_h, horizon, t, &rng))
            .collect()
    };

    // Fixed merge order: trial-major, block-minor.
    let mut pooled: Counts = [[[0; 2]; 2]; 2];
    let mut block_rates = Vec::with_capacity(trials * BLOCKS_PER_TRIAL);
    for blocks in &all_blocks {
        for block in blocks {
            merge(&mut pooled, block);
            block_rates.push(plugin_rate(block));
        }
    }
    let estimate = plugin_rate(&pooled);
    let nb = block_rates.len() as f64;
    let mean = block_rates.iter().sum::<f64>() / nb;
    let var = block_rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (nb - 1.0);
    let std_error = (var / nb).sqrt();

    let mut diagnostics = Vec::new();
    for x in 0..2 {
        for yp in 0..2 {
            if pooled[x][yp][0] + pooled[x][yp][1] == 0 {
                diagnostics.push(format!(
                    "conditioning event never observed: x={}, y_prev={}",
                    if x == 0 { "L" } else { "H" },
                    if yp == 0 { "U" } else { "B" },
                ));
            }
        }
    }

    Ok(RateEstimate {
        bits_per_step: estimate,
        std_error,
        horizon,
        trials,
        seed,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConcentrationSymbol::{H, L};
    use ReceptorState::{B, U};

    fn p(a: f64, b: f64, c: f64) -> ChannelParams {
        ChannelParams::new(a, b, c).unwrap()
    }

    #[test]
    fn kernel_matches_displays() {
        let params = p(0.1, 0.9, 0.5);
        for (got, want) in [
            (kernel_for_input(&params, L).rows(), [[0.9, 0.1], [0.5, 0.5]]),
            (kernel_for_input(&params, H).rows(), [[0.1, 0.9], [0.5, 0.5]]),
        ] {
            for (gr, wr) in got.iter().zip(want) {
                for (g, w) in gr.iter().zip(wr) {
                    assert!((g - w).abs() < 1e-15);
                }
            }
        }
        let degenerate = p(0.0, 0.0, 1.0);
        assert_eq!(
            kernel_for_input(&degenerate, H).rows(),
            [[1.0, 0.0], [1.0, 0.0]]
        );
    }

    #[test]
    fn unbinding_row_is_input_independent() {
        let params = p(0.2, 0.7, 0.3);
        assert_eq!(
            kernel_for_input(&params, L).row(B),
            kernel_for_input(&params, H).row(B)
        );
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(0.9, 0.1, 0.5).is_err());
        assert!(ChannelParams::new(-0.1, 0.5, 0.5).is_err());
        assert!(ChannelParams::new(0.1, 1.1, 0.5).is_err());
        assert!(ChannelParams::new(0.1, 0.9, f64::NAN).is_err());
        assert!(p(0.1, 0.9, 0.5).is_strict_interior());
        assert!(!p(0.0, 0.9, 0.5).is_strict_interior());
        assert!(!p(0.1, 1.0, 0.5).is_strict_interior());
    }

    #[test]
    fn aggregated_kernel_examples() {
        let params = p(0.1, 0.9, 0.5);
        let agg = aggregated_kernel(&params, 0.5).unwrap();
        assert!((agg.alpha_bar - 0.5).abs() < 1e-15);
        assert_eq!(agg.kernel.rows(), [[0.5, 0.5], [0.5, 0.5]]);

        let pure_l = aggregated_kernel(&params, 1.0).unwrap();
        assert!((pure_l.alpha_bar - 0.1).abs() < 1e-15);
        assert_eq!(pure_l.kernel.rows(), kernel_for_input(&params, L).rows());

        let flat = p(0.3, 0.3, 0.2);
        for q in [0.0, 0.25, 1.0] {
            assert!((aggregated_kernel(&flat, q).unwrap().alpha_bar - 0.3).abs() < 1e-15);
        }

        assert!(aggregated_kernel(&params, 1.5).is_err());
    }

    #[test]
    fn aggregated_kernel_is_affine_in_p() {
        let params = p(0.15, 0.8, 0.4);
        let at = |q: f64| aggregated_kernel(&params, q).unwrap().alpha_bar;
        for q in [0.1, 0.35, 0.62] {
            let interp = at(0.0) * (1.0 - q) + at(1.0) * q;
            assert!((at(q) - interp).abs() < 1e-14);
        }
    }

    #[test]
    fn step_distribution_examples() {
        let params = p(0.1, 0.9, 0.5);
        assert_eq!(step_distribution(&params, H, B), [0.5, 0.5]);
        assert_eq!(step_distribution(&params, L, B), [0.5, 0.5]);
        let certain = p(0.3, 1.0, 0.2);
        assert_eq!(step_distribution(&certain, H, U), [0.0, 1.0]);
    }

    #[test]
    fn trajectory_degenerate_chains() {
        let no_bind = p(0.0, 0.0, 1.0);
        let t = sample_trajectory(&no_bind, &[H, L, H, H], U, 1).unwrap();
        assert!(t.outputs.iter().all(|&y| y == U));

        let absorb = p(1.0, 1.0, 0.0);
        let t = sample_trajectory(&absorb, &[L, H, L, H], U, 2).unwrap();
        assert!(t.outputs.iter().all(|&y| y == B));
    }

    #[test]
    fn trajectory_deterministic_for_seed() {
        let params = p(0.1, 0.9, 0.5);
        let a = sample_trajectory(&params, &[H, H, H, H], U, 42).unwrap();
        let b = sample_trajectory(&params, &[H, H, H, H], U, 42).unwrap();
        assert_eq!(a, b);
        assert!(sample_trajectory(&params, &[], U, 42).is_err());
    }

    #[test]
    fn empirical_frequencies_match_kernel() {
        // chi-square-style sanity: each empirical transition probability
        // within 5 sigma of the generating kernel at 1e5 steps.
        let params = p(0.2, 0.8, 0.4);
        let n = 100_000;
        let rng = CounterRng::new(7);
        let inputs: Vec<_> = (0..n)
            .map(|i| if rng.uniform(10, i as u64) < 0.5 { H } else { L })
            .collect();
        let t = sample_trajectory(&params, &inputs, U, 3).unwrap();
        let mut counts: Counts = [[[0; 2]; 2]; 2];
        let mut y_prev = U;
        for (i, &y) in t.outputs.iter().enumerate() {
            counts[t.inputs[i].index()][y_prev.index()][y.index()] += 1;
            y_prev = y;
        }
        for x in [L, H] {
            for yp in [U, B] {
                let row_total = counts[x.index()][yp.index()][0] + counts[x.index()][yp.index()][1];
                let expect = step_distribution(&params, x, yp);
                for y in [U, B] {
                    let freq = counts[x.index()][yp.index()][y.index()] as f64 / row_total as f64;
                    let pth = expect[y.index()];
                    let sigma = (pth * (1.0 - pth) / row_total as f64).sqrt();
                    assert!(
                        (freq - pth).abs() < 5.0 * sigma,
                        "x={x:?} yp={yp:?} y={y:?}: {freq} vs {pth}"
                    );
                }
            }
        }
    }

    #[test]
    fn mc_rate_uninformative_channel() {
        let params = p(0.4, 0.4, 0.3);
        let est = estimate_rate_mc(&params, 0.5, 50_000, 2, 5, 1).unwrap();
        assert!(est.bits_per_step.abs() <= 3.0 * est.std_error.max(1e-4));
    }

    #[test]
    fn mc_rate_constant_input() {
        let params = p(0.1, 0.9, 0.5);
        let est = estimate_rate_mc(&params, 0.0, 50_000, 2, 5, 1).unwrap();
        assert!(est.bits_per_step.abs() <= 3.0 * est.std_error.max(1e-4));
        // Inputs are all L, so H conditioning events are never observed.
        assert!(!est.diagnostics.is_empty());
    }

    #[test]
    fn mc_rate_worker_count_invariance() {
        let params = p(0.1, 0.9, 0.5);
        let a = estimate_rate_mc(&params, 0.5, 20_000, 4, 11, 1).unwrap();
        let b = estimate_rate_mc(&params, 0.5, 20_000, 4, 11, 4).unwrap();
        assert_eq!(a.bits_per_step.to_bits(), b.bits_per_step.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn mc_rate_validation() {
        let params = p(0.1, 0.9, 0.5);
        assert!(estimate_rate_mc(&params, 0.5, 1, 1, 0, 1).is_err());
        assert!(estimate_rate_mc(&params, 0.5, 10, 0, 0, 1).is_err());
        assert!(estimate_rate_mc(&params, 1.5, 10, 1, 0, 1).is_err());
    }
}
