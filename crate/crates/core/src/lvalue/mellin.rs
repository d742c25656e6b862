//! Numerical check of `∫_0^∞ x^{-s} cos(2πkx) dx/√x = Γ(1/2-s) (2π|k|)^{s-1/2} cos(π(1/2-s)/2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::ln_gamma_real;
use crate::error::{Error, Result};

/// Both sides of the identity at one `(s, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MellinCheck {
    pub s: f64,
    pub k: i64,
    pub lhs: f64,
    pub rhs: f64,
}

impl MellinCheck {
    pub fn abs_error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Quadrature resolution: Gauss–Legendre order, panels on the first
/// half-period, and number of half-periods before the asymptotic tail.
#[derive(Clone, Copy, Debug)]
pub struct Resolution {
    pub order: usize,
    pub head_panels: usize,
    pub half_periods: usize,
}

impl Resolution {
    pub const STANDARD: Resolution = Resolution { order: 20, head_panels: 24, half_periods: 80 };
    pub const FINE: Resolution = Resolution { order: 30, head_panels: 40, half_periods: 160 };
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn integrate(nodes: &[(f64, f64)], a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// `∫_0^∞ y^{-α} cos y dy` for `0 < α < 1`, after one integration by parts:
/// `α ∫_0^∞ y^{-α-1} sin y dy`.
fn cosine_mellin(alpha: f64, res: Resolution) -> f64 {
    let nodes = gauss_legendre(res.order);
    let beta = 1.0 / (1.0 - alpha);
    // First half-period with y = u^β, which turns y^{-α} dy into β du.
    let u_end = PI.powf(1.0 - alpha);
    let sinc = |y: f64| if y == 0.0 { 1.0 } else { y.sin() / y };
    let mut head = 0.0;
    // Panels graded geometrically toward u = 0.
    let mut right = u_end;
    for _ in 0..res.head_panels {
        let left = right * 0.5;
        head += integrate(&nodes, left, right, |u| beta * sinc(u.powf(beta)));
        right = left;
    }
    head += integrate(&nodes, 0.0, right, |u| beta * sinc(u.powf(beta)));
    let f = |y: f64| y.powf(-alpha - 1.0) * y.sin();
    let mut body = 0.0;
    for j in 1..res.half_periods {
        body += integrate(&nodes, j as f64 * PI, (j + 1) as f64 * PI, f);
    }
    // Tail from X = Nπ with N even: Σ_j (-1)^j g^{(2j)}(X), g = y^{-α-1}.
    let x = res.half_periods as f64 * PI;
    let mut tail = 0.0;
    let mut coeff = 1.0;
    let mut p = -alpha - 1.0;
    for j in 0..6 {
        let term = coeff * x.powf(p);
        tail += if j % 2 == 0 { term } else { -term };
        coeff *= p * (p - 1.0);
        p -= 2.0;
    }
    alpha * (head + body + tail)
}

/// Left side by quadrature at resolution `res`.
pub fn mellin_lhs(s: f64, k: i64, res: Resolution) -> f64 {
    let alpha = s + 0.5;
    let omega = 2.0 * PI * k.unsigned_abs() as f64;
    // x = y/ω scales the integral by ω^{α-1}.
    omega.powf(alpha - 1.0) * cosine_mellin(alpha, res)
}

/// Closed form of the right side.
pub fn mellin_rhs(s: f64, k: i64) -> f64 {
    let a = 0.5 - s;
    let omega = 2.0 * PI * k.unsigned_abs() as f64;
    ln_gamma_real(a).exp() * omega.powf(-a) * (PI / 2.0 * a).cos()
}

pub fn mellin_check(s: f64, k: i64) -> Result<MellinCheck> {
    if !(s > -0.5 && s < 0.5) || k == 0 {
        return Err(Error::PreconditionViolated(format!(
            "Mellin check needs -1/2 < s < 1/2 and k ≠ 0, got s = {s}, k = {k}"
        )));
    }
    let lhs = mellin_lhs(s, k, Resolution::STANDARD);
    let fine = mellin_lhs(s, k, Resolution::FINE);
    if (lhs - fine).abs() > 1e-9 * fine.abs().max(1.0) {
        return Err(Error::QuadratureNotConverged(format!(
            "Mellin quadrature at s = {s}, k = {k}: {lhs} vs {fine}"
        )));
    }
    Ok(MellinCheck { s, k, lhs: fine, rhs: mellin_rhs(s, k) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_one() {
        let c = mellin_check(0.25, 1).unwrap();
        assert!(c.abs_error() < 1e-6, "{c:?}");
        let coarse = mellin_lhs(0.25, 1, Resolution::STANDARD);
        assert!((coarse - c.lhs).abs() < 1e-9);
    }

    #[test]
    fn grid() {
        for &s in &[-0.4, -0.2, 0.0, 0.2, 0.4] {
            for &k in &[1i64, -2, 3, 5, -8] {
                let c = mellin_check(s, k).unwrap();
                assert!(c.abs_error() < 1e-6, "{c:?}");
            }
        }
    }

    #[test]
    fn symmetry_and_scaling() {
        let a = mellin_check(0.1, 3).unwrap();
        let b = mellin_check(0.1, -3).unwrap();
        assert_eq!(a.lhs, b.lhs);
        for &s in &[-0.3, 0.0, 0.35] {
            let r1 = mellin_rhs(s, 2);
            let r4 = mellin_rhs(s, 8);
            assert!((r4 - r1 * 4f64.powf(s - 0.5)).abs() < 1e-14);
        }
        assert!(mellin_check(0.5, 1).is_err());
        assert!(mellin_check(0.0, 0).is_err());
    }

    #[test]
    fn legendre_nodes_integrate_polynomials() {
        let nodes = gauss_legendre(10);
        let v = integrate(&nodes, 0.0, 2.0, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9);
    }
}
