//! Binary entropy, stationary distributions of 2x2 chains, and the
//! support-matrix irreducibility/aperiodicity tests.

use crate::channel::{kernel_for_input, ChannelParams, ConcentrationSymbol, TransitionKernel};
use crate::error::{check_probability, Error, Result};
use serde::{Deserialize, Serialize};

/// Binary entropy in bits, with the `0 log 0 = 0` convention. This
/// convention is adopted once here and reused by every entropy computation
/// in the crate.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(h2(p))
}

/// Unchecked binary entropy for hot paths; `p` must be in `[0, 1]`.
pub(crate) fn h2(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Stationary distribution `(pi_U, pi_B)` of a 2x2 kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution {
    pub pi_u: f64,
    pub pi_b: f64,
}

impl StationaryDistribution {
    pub fn as_array(&self) -> [f64; 2] {
        [self.pi_u, self.pi_b]
    }
}

/// Solves `pi P = pi` in closed form: with `a = P(U -> B)` and
/// `b = P(B -> U)`, `pi_U = b / (a + b)`. Absorbing chains (exactly one
/// off-diagonal zero) give the point mass; `a = b = 0` is reducible.
pub fn stationary_distribution(kernel: &TransitionKernel) -> Result<StationaryDistribution> {
    let a = kernel.rows()[0][1];
    let b = kernel.rows()[1][0];
    if a == 0.0 && b == 0.0 {
        return Err(Error::ReducibleChain);
    }
    Ok(StationaryDistribution {
        pi_u: b / (a + b),
        pi_b: a / (a + b),
    })
}

/// 0/1 matrix marking receptor transitions that are positive under every
/// input symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportMatrix {
    pub entries: [[bool; 2]; 2],
}

/// Entry `(i, j)` is set iff both input-conditioned kernels have a strictly
/// positive `(i, j)` entry.
pub fn support_matrix(params: &ChannelParams) -> SupportMatrix {
    let low = kernel_for_input(params, ConcentrationSymbol::L);
    let high = kernel_for_input(params, ConcentrationSymbol::H);
    let mut entries = [[false; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            entries[i][j] = low.rows()[i][j].min(high.rows()[i][j]) > 0.0;
        }
    }
    SupportMatrix { entries }
}

fn bool_mul(a: [[bool; 2]; 2], b: [[bool; 2]; 2]) -> [[bool; 2]; 2] {
    let mut out = [[false; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (a[i][0] && b[0][j]) || (a[i][1] && b[1][j]);
        }
    }
    out
}

// Return-time structure of a 2-state Boolean chain is determined by powers
// up to 4.
const MAX_POWER: usize = 4;

fn powers(m: &SupportMatrix) -> [[[bool; 2]; 2]; MAX_POWER] {
    let mut out = [m.entries; MAX_POWER];
    for l in 1..MAX_POWER {
        out[l] = bool_mul(out[l - 1], m.entries);
    }
    out
}

/// True iff every state pair is connected by some Boolean power of the
/// support matrix.
pub fn strong_irreducibility(m: &SupportMatrix) -> bool {
    let pows = powers(m);
    (0..2).all(|i| (0..2).all(|j| pows.iter().any(|p| p[i][j])))
}

/// True iff the chain is strongly irreducible and, for every state, the
/// gcd of its Boolean-power return lengths is 1.
pub fn strong_aperiodicity(m: &SupportMatrix) -> bool {
    if !strong_irreducibility(m) {
        return false;
    }
    let pows = powers(m);
    (0..2).all(|i| {
        let mut g = 0usize;
        for (l, p) in pows.iter().enumerate() {
            if p[i][i] {
                g = gcd(g, l + 1);
            }
        }
        g == 1
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
