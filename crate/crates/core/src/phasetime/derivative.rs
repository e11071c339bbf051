//! Finite-difference derivatives on sampled curves.

use crate::error::{invalid, Result};

/// Finite-difference order used for phase derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// 3-point central differences, 3-point one-sided at the ends.
    #[default]
    Second,
    /// 5-point central differences; 5-point off-centre at the second and
    /// penultimate nodes; 3-point one-sided at the ends. Uniform axes only.
    Fourth,
}

/// Relative spacing deviation below which an axis counts as uniform.
const UNIFORM_TOL: f64 = 1e-9;

fn uniform_step(x: &[f64]) -> Option<f64> {
    let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    x.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= UNIFORM_TOL * h.abs())
        .then_some(h)
}

/// dy/dx sampled at every node of `x` (strictly increasing, at least 3 nodes).
pub fn derivative(x: &[f64], y: &[f64], stencil: Stencil) -> Result<Vec<f64>> {
    let n = x.len();
    if n != y.len() {
        return Err(invalid(
            "y",
            format!("length {} differs from axis length {n}", y.len()),
        ));
    }
    if n < 3 {
        return Err(invalid("x", format!("need at least 3 samples, got {n}")));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("x", "axis must be strictly increasing"));
    }
    match (stencil, uniform_step(x)) {
        (Stencil::Second, Some(h)) => Ok(second_uniform(y, h)),
        (Stencil::Second, None) => Ok(second_nonuniform(x, y)),
        (Stencil::Fourth, Some(h)) if n >= 5 => Ok(fourth_uniform(y, h)),
        (Stencil::Fourth, Some(_)) => Err(invalid(
            "x",
            "fourth-order stencil needs at least 5 samples",
        )),
        (Stencil::Fourth, None) => Err(invalid("x", "fourth-order stencil needs a uniform axis")),
    }
}

fn ends(y: &[f64], h: f64, d: &mut [f64]) {
    let n = y.len();
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
}

fn second_uniform(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
    }
    ends(y, h, &mut d);
    d
}

fn fourth_uniform(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
    }
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h);
    d[n - 2] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5])
        / (12.0 * h);
    ends(y, h, &mut d);
    d
}

/// Lagrange 3-point derivative at node `at` of the points (x[i..i+3], y[i..i+3]).
fn lagrange3(x: &[f64], y: &[f64], i: usize, at: usize) -> f64 {
    let (x0, x1, x2) = (x[i], x[i + 1], x[i + 2]);
    let t = x[at];
    y[i] * (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y[i + 1] * (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y[i + 2] * (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1))
}

fn second_nonuniform(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = lagrange3(x, y, i - 1, i);
    }
    d[0] = lagrange3(x, y, 0, 0);
    d[n - 1] = lagrange3(x, y, n - 3, n - 1);
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, h: f64) -> Vec<f64> {
        (0..n).map(|i| 1.0 + i as f64 * h).collect()
    }

    #[test]
    fn second_order_is_exact_on_quadratics() {
        let x = axis(7, 0.25);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let d = derivative(&x, &y, Stencil::Second).unwrap();
        for (t, di) in x.iter().zip(&d) {
            assert!((di - (6.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_is_exact_on_quartics() {
        let x = axis(9, 0.1);
        let y: Vec<f64> = x.iter().map(|t| t.powi(4) - 2.0 * t.powi(3) + t).collect();
        let d = derivative(&x, &y, Stencil::Fourth).unwrap();
        for (i, (t, di)) in x.iter().zip(&d).enumerate().skip(1).take(7) {
            let exact = 4.0 * t.powi(3) - 6.0 * t * t + 1.0;
            assert!((di - exact).abs() < 1e-10, "node {i}");
        }
    }

    #[test]
    fn nonuniform_second_order_is_exact_on_quadratics() {
        let x = [0.0, 0.1, 0.35, 0.4, 1.0];
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t * t + 5.0).collect();
        let d = derivative(&x, &y, Stencil::Second).unwrap();
        for (t, di) in x.iter().zip(&d) {
            assert!((di - 4.0 * t).abs() < 1e-12);
        }
        assert!(derivative(&x, &y, Stencil::Fourth).is_err());
    }

    #[test]
    fn rejects_short_or_unsorted() {
        assert!(derivative(&[0.0, 1.0], &[0.0, 1.0], Stencil::Second).is_err());
        assert!(derivative(&[0.0, 2.0, 1.0], &[0.0; 3], Stencil::Second).is_err());
        assert!(derivative(&[0.0, 1.0, 2.0, 3.0], &[0.0; 4], Stencil::Fourth).is_err());
    }
}
