//! Scalar maximization: coarse grid bracketing plus golden-section
//! refinement.

/// 2 - phi; the golden-section step ratio.
const RESP: f64 = 2.0 - 1.618_033_988_749_895;

#[derive(Debug, Clone, Copy)]
pub struct ScalarMax {
    pub x: f64,
    pub fx: f64,
    pub evals: u64,
    pub bracket_width: f64,
}

/// Golden-section search for the maximum of `f` on `[a, b]`, refined until
/// the bracket is no wider than `tol`.
pub fn golden_section_max(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> ScalarMax {
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2u64;

    while (b - a) > tol && evals < 10_000 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }

    let (x, fx) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    ScalarMax {
        x,
        fx,
        evals,
        bracket_width: b - a,
    }
}

/// Grid scan with step `step` over `[0, 1]`, then golden-section refinement
/// of the bracketing interval. Ties on the grid resolve to the smallest
/// abscissa.
pub fn grid_then_golden_max(mut f: impl FnMut(f64) -> f64, step: f64, tol: f64) -> ScalarMax {
    let n = (1.0 / step).round() as usize;
    let mut best_i = 0usize;
    let mut best = f(0.0);
    for i in 1..=n {
        let x = (i as f64 * step).min(1.0);
        let fx = f(x);
        if fx > best {
            best = fx;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { 0.0 } else { (best_i - 1) as f64 * step };
    let hi = ((best_i + 1) as f64 * step).min(1.0);
    let mut refined = golden_section_max(&mut f, lo, hi, tol);
    refined.evals += n as u64 + 1;
    if best > refined.fx {
        refined.x = best_i as f64 * step;
        refined.fx = best;
    }
    refined
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let f = |x: f64| -(x - 0.37).powi(2);
        let r = grid_then_golden_max(f, 1e-3, 1e-10);
        assert!((r.x - 0.37).abs() < 1e-8);
        assert!(r.bracket_width <= 1e-10);
    }

    #[test]
    fn finds_boundary_max() {
        let f = |x: f64| x;
        let r = grid_then_golden_max(f, 1e-3, 1e-9);
        assert!((r.x - 1.0).abs() < 1e-8);
    }

    #[test]
    fn golden_section_shrinks_bracket() {
        let r = golden_section_max(|x| -(x - 0.5).abs(), 0.0, 1.0, 1e-6);
        assert!(r.bracket_width <= 1e-6);
        assert!((r.x - 0.5).abs() < 1e-5);
    }
}
