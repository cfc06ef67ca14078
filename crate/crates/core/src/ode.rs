//! Continuous-time master-equation reference for the receptor kinetics,
//! and the consistency check tying the discrete channel to it.

use crate::channel::{ChannelParams, ConcentrationSymbol};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Input-dependent transition-rate matrices: one `n x n` generator per
/// concentration symbol. Off-diagonals are rates per unit time; each row
/// sums to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrix {
    n: usize,
    q: [Vec<Vec<f64>>; 2],
}

impl RateMatrix {
    pub fn new(q: [Vec<Vec<f64>>; 2]) -> Result<Self> {
        let n = q[0].len();
        if n == 0 {
            return Err(Error::invalid("q", "needs at least one state"));
        }
        for m in &q {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::invalid("q", "matrices must be square and same size"));
            }
            for (j, row) in m.iter().enumerate() {
                let mut sum = 0.0;
                for (k, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::invalid("q", "entries must be finite"));
                    }
                    if j != k && v < 0.0 {
                        return Err(Error::invalid("q", "off-diagonal rates must be >= 0"));
                    }
                    sum += v;
                }
                if sum.abs() > 1e-12 {
                    return Err(Error::invalid(
                        "q",
                        format!("row {j} sums to {sum}, expected 0"),
                    ));
                }
            }
        }
        Ok(RateMatrix { n, q })
    }

    /// Same generator for both input symbols.
    pub fn input_free(m: Vec<Vec<f64>>) -> Result<Self> {
        RateMatrix::new([m.clone(), m])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self, x: ConcentrationSymbol) -> &Vec<Vec<f64>> {
        &self.q[x.index()]
    }

    fn max_exit_rate(&self) -> f64 {
        self.q
            .iter()
            .flat_map(|m| m.iter().enumerate().map(|(j, row)| row[j].abs()))
            .fold(0.0, f64::max)
    }
}

/// A distribution trace sampled on the integration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTrace {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

fn rk4_step(q: &[Vec<f64>], p: &[f64], dt: f64) -> Vec<f64> {
    let n = p.len();
    let deriv = |p: &[f64]| -> Vec<f64> {
        let mut d = vec![0.0; n];
        for (j, row) in q.iter().enumerate() {
            for (k, &rate) in row.iter().enumerate() {
                d[k] += p[j] * rate;
            }
        }
        d
    };
    let k1 = deriv(p);
    let mid1: Vec<f64> = (0..n).map(|i| p[i] + 0.5 * dt * k1[i]).collect();
    let k2 = deriv(&mid1);
    let mid2: Vec<f64> = (0..n).map(|i| p[i] + 0.5 * dt * k2[i]).collect();
    let k3 = deriv(&mid2);
    let end: Vec<f64> = (0..n).map(|i| p[i] + dt * k3[i]).collect();
    let k4 = deriv(&end);
    (0..n)
        .map(|i| p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Fixed-step fourth-order integration of `dp/dt = p Q(X(t))` over a
/// piecewise-constant input trace of `(symbol, duration)` pieces.
/// Distributions are renormalized every step.
pub fn integrate_master(
    rates: &RateMatrix,
    input_trace: &[(ConcentrationSymbol, f64)],
    p0: &[f64],
    dt: f64,
) -> Result<DistributionTrace> {
    if p0.len() != rates.n {
        return Err(Error::invalid("p0", "length must match the state count"));
    }
    let sum: f64 = p0.iter().sum();
    if p0.iter().any(|&v| !(0.0..=1.0).contains(&v)) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("p0", "must be a probability vector"));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    let fastest = rates.max_exit_rate();
    if fastest > 0.0 {
        let bound = 1.0 / fastest;
        if dt > bound {
            return Err(Error::UnstableStep { dt, bound });
        }
    }
    let mut times = vec![0.0];
    let mut states = vec![p0.to_vec()];
    let mut t = 0.0;
    let mut p = p0.to_vec();
    for &(sym, duration) in input_trace {
        if !(duration > 0.0) {
            return Err(Error::invalid("input_trace", "durations must be > 0"));
        }
        let q = rates.matrix(sym);
        let steps = (duration / dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        for _ in 0..steps {
            p = rk4_step(q, &p, h);
            let mass: f64 = p.iter().sum();
            for v in &mut p {
                *v /= mass;
            }
            t += h;
            times.push(t);
            states.push(p.clone());
        }
    }
    Ok(DistributionTrace { times, states })
}

/// Receptor binding kinetics: on-rate `k_plus` (per concentration per
/// unit time), off-rate `k_minus`, and a piecewise-constant concentration
/// given as `(concentration, duration)` pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingKinetics {
    pub k_plus: f64,
    pub k_minus: f64,
    pub pieces: Vec<(f64, f64)>,
}

impl BindingKinetics {
    pub fn new(k_plus: f64, k_minus: f64, pieces: Vec<(f64, f64)>) -> Result<Self> {
        if !(k_plus >= 0.0) || !(k_minus >= 0.0) {
            return Err(Error::invalid("rates", "must be >= 0"));
        }
        if pieces.is_empty() {
            return Err(Error::invalid("pieces", "needs at least one piece"));
        }
        for &(c, d) in &pieces {
            if !(c >= 0.0) {
                return Err(Error::invalid("pieces", "concentrations must be >= 0"));
            }
            if !(d > 0.0) {
                return Err(Error::invalid("pieces", "durations must be > 0"));
            }
        }
        Ok(BindingKinetics {
            k_plus,
            k_minus,
            pieces,
        })
    }

    /// Equilibrium bound probability at constant concentration `c`.
    pub fn equilibrium(&self, c: f64) -> f64 {
        let on = self.k_plus * c;
        if on + self.k_minus == 0.0 {
            return 0.0;
        }
        on / (on + self.k_minus)
    }

    /// Two-state generator (states `U`, `B`) at concentration `c`.
    pub fn generator(&self, c: f64) -> Vec<Vec<f64>> {
        let on = self.k_plus * c;
        vec![vec![-on, on], vec![self.k_minus, -self.k_minus]]
    }
}

/// A scalar bound-probability trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    pub times: Vec<f64>,
    pub bound_prob: Vec<f64>,
}

/// Integrates `dp/dt = k_plus c(t) (1 - p) - k_minus p` for the bound
/// probability `p`, with the same stepper and stability rule as the
/// master-equation path.
pub fn integrate_two_state(kin: &BindingKinetics, p0: f64, dt: f64) -> Result<BoundTrace> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::invalid("p0", "must be a probability"));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    let fastest = kin
        .pieces
        .iter()
        .map(|&(c, _)| kin.k_plus * c + kin.k_minus)
        .fold(0.0, f64::max);
    if fastest > 0.0 && dt > 1.0 / fastest {
        return Err(Error::UnstableStep {
            dt,
            bound: 1.0 / fastest,
        });
    }
    let mut times = vec![0.0];
    let mut bound = vec![p0];
    let mut t = 0.0;
    let mut p = p0;
    for &(c, duration) in &kin.pieces {
        let on = kin.k_plus * c;
        let f = |p: f64| on * (1.0 - p) - kin.k_minus * p;
        let steps = (duration / dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        for _ in 0..steps {
            let k1 = f(p);
            let k2 = f(p + 0.5 * h * k1);
            let k3 = f(p + 0.5 * h * k2);
            let k4 = f(p + h * k3);
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            times.push(t);
            bound.push(p);
        }
    }
    Ok(BoundTrace {
        times,
        bound_prob: bound,
    })
}

/// One row of the discretization-consistency study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub dt: f64,
    pub alpha_l: f64,
    pub alpha_h: f64,
    pub beta: f64,
    /// True when a derived probability saturates at 1.
    pub boundary: bool,
    /// Max over the two concentrations of the occupancy error at time
    /// `horizon`.
    pub deviation: f64,
}

/// For each step size, builds the first-order channel parameters
/// `alpha = k_plus c dt`, `beta = k_minus dt`, iterates the discrete
/// chain for `horizon / dt` steps from the unbound state, and reports the
/// deviation of its bound-state occupancy from the closed-form
/// continuous-time relaxation. The deviation is first order in `dt`.
pub fn discretization_consistency(
    kin: &BindingKinetics,
    c_l: f64,
    c_h: f64,
    dt_schedule: &[f64],
    horizon: f64,
) -> Result<Vec<ConsistencyRow>> {
    if !(c_l >= 0.0) || !(c_h >= c_l) {
        return Err(Error::invalid("concentrations", "need 0 <= c_l <= c_h"));
    }
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon", "must be > 0"));
    }
    if dt_schedule.is_empty() {
        return Err(Error::invalid("dt_schedule", "must be nonempty"));
    }
    let mut rows = Vec::with_capacity(dt_schedule.len());
    for &dt in dt_schedule {
        if !(dt > 0.0) {
            return Err(Error::invalid("dt_schedule", "steps must be > 0"));
        }
        let alpha_l = kin.k_plus * c_l * dt;
        let alpha_h = kin.k_plus * c_h * dt;
        let beta = kin.k_minus * dt;
        // Surfaces the invalid-probability rejection from the parameter
        // constructor.
        let params = ChannelParams::new(alpha_l, alpha_h, beta)?;
        let boundary = !params.is_strict_interior();
        let steps = (horizon / dt).round().max(1.0) as usize;
        let mut deviation = 0.0f64;
        for (alpha, c) in [(alpha_l, c_l), (alpha_h, c_h)] {
            let mut p = 0.0;
            for _ in 0..steps {
                p = (1.0 - p) * alpha + p * (1.0 - beta);
            }
            let t = steps as f64 * dt;
            let p_star = kin.equilibrium(c);
            let rate = kin.k_plus * c + kin.k_minus;
            let exact = p_star - p_star * (-rate * t).exp();
            deviation = deviation.max((p - exact).abs());
        }
        rows.push(ConsistencyRow {
            dt,
            alpha_l,
            alpha_h,
            beta,
            boundary,
            deviation,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("series", "need >= 2 matching points"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("series", "values must be positive"));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(cov / var)
}
