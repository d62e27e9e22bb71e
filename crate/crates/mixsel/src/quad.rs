//! Adaptive Simpson quadrature on finite intervals.
//!
//! Used for inner products against basis functions whenever no exact
//! antiderivative route exists (trigonometric basis against a polynomial
//! density, diagnostics on fitted estimators).

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Classic adaptive Simpson with Richardson correction. When the recursion
/// exhausts its depth budget the local estimate is accepted anyway — by then
/// the offending subinterval has width `(b−a)·2⁻⁴⁰`, so an isolated jump
/// (a histogram edge, say) costs far less than any tolerance in use. Only a
/// non-finite discrepancy, i.e. an integrand producing NaN or ±∞, errors.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integrates `f` piece by piece so that discontinuities at the cut points do
/// not stall the subdivision.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(f, w[0], w[1], tol)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        if delta.is_finite() {
            return Ok(left + right + delta / 15.0);
        }
        return Err(Error::QuadratureDidNotConverge { a, b });
    }
    let half_tol = 0.5 * tol;
    Ok(step(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + step(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials_exactly() {
        let f = |x: f64| 3.0 * x * x;
        assert_abs_diff_eq!(integrate(&f, 0.0, 1.0, 1e-12).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn integrates_oscillatory_integrands() {
        let f = |x: f64| (2.0 * PI * 17.0 * x).cos().powi(2);
        assert_abs_diff_eq!(integrate(&f, 0.0, 1.0, 1e-12).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn piecewise_integration_respects_cuts() {
        let f = |x: f64| if x < 0.5 { 1.0 } else { 3.0 };
        let cuts = [0.0, 0.5, 1.0];
        assert_abs_diff_eq!(integrate_piecewise(&f, &cuts, 1e-12).unwrap(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn depth_cap_tolerates_isolated_jumps() {
        let f = |x: f64| if x < 1.0 / 3.0 { 0.0 } else { 2.0 };
        assert_abs_diff_eq!(integrate(&f, 0.0, 1.0, 1e-12).unwrap(), 4.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn non_finite_integrands_error_out() {
        let f = |_: f64| f64::NAN;
        assert!(matches!(
            integrate(&f, 0.0, 1.0, 1e-12),
            Err(Error::QuadratureDidNotConverge { .. })
        ));
    }
}
