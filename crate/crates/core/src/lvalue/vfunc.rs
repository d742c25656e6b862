//! The AFE cutoff `V(x) = (1/2πi) ∫_{(c)} γ(1/2+s)²/γ(1/2)² x^{-s} ds/s` with `G = 1`.
//!
//! Along `Re s = c` the integral is `(1/π) ∫_0^∞ Re F(c+it) dt`, which the
//! trapezoid rule resolves to near machine precision because `F` is analytic
//! in a strip and decays like `e^{-π|t|/2}`. For `x < 1` the line is moved to
//! `c = -1/4`, picking up the residue `1` at `s = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gamma::{ln_gamma, EULER_GAMMA, GAMMA_QUARTER};
use crate::error::{Error, Result};

const STEP: f64 = 0.02;
const NODE_FLOOR: f64 = 1e-18;
const MAX_HEIGHT: f64 = 400.0;

/// `F(s) x^{s}`, i.e. the integrand without the `x^{-s}` factor.
fn kernel(s: Complex64) -> Result<Complex64> {
    let lg = ln_gamma(0.25 + s / 2.0)? - GAMMA_QUARTER.ln();
    Ok((2.0 * lg - s * PI.ln()).exp() / s)
}

/// Trapezoid nodes on one vertical line.
#[derive(Clone, Debug)]
pub struct VQuadrature {
    c: f64,
    residue: f64,
    t: Vec<f64>,
    w: Vec<Complex64>,
}

impl VQuadrature {
    /// Nodes on `Re s = c`; `c > 0` or `-1/2 < c < 0`.
    pub fn new(c: f64) -> Result<Self> {
        if c == 0.0 || c <= -0.5 {
            return Err(Error::PreconditionViolated(format!(
                "abscissa {c} must avoid the poles at 0 and -1/2"
            )));
        }
        let residue = if c < 0.0 { 1.0 } else { 0.0 };
        let mut t = Vec::new();
        let mut w = Vec::new();
        let first = kernel(Complex64::new(c, 0.0))?.norm();
        let mut j = 0usize;
        loop {
            let tj = j as f64 * STEP;
            if tj > MAX_HEIGHT {
                return Err(Error::QuadratureNotConverged(format!(
                    "V integrand still above {NODE_FLOOR:e} at height {MAX_HEIGHT}"
                )));
            }
            let f = kernel(Complex64::new(c, tj))?;
            if j > 0 && f.norm() < NODE_FLOOR * first {
                break;
            }
            let weight = if j == 0 { 0.5 } else { 1.0 };
            t.push(tj);
            w.push(f * weight * STEP / PI);
            j += 1;
        }
        Ok(VQuadrature { c, residue, t, w })
    }

    pub fn abscissa(&self) -> f64 {
        self.c
    }

    /// Truncation height of the quadrature.
    pub fn height(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    /// `V(x)` and `dV/d(ln x)`.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let l = x.ln();
        let scale = (-self.c * l).exp();
        let mut v = 0.0;
        let mut dv = 0.0;
        for (&tj, &wj) in self.t.iter().zip(&self.w) {
            let z = wj * Complex64::from_polar(1.0, -tj * l);
            v += z.re;
            dv -= (z * Complex64::new(self.c, tj)).re;
        }
        (self.residue + scale * v, scale * dv)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// Two-sided sum with the conjugate half evaluated independently;
    /// returns the value and the leftover imaginary part.
    pub fn eval_two_sided(&self, x: f64) -> Result<(f64, f64)> {
        let l = x.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&tj, &wj) in self.t.iter().zip(&self.w) {
            let weight = if tj == 0.0 { 0.5 } else { 1.0 };
            let s = Complex64::new(self.c, -tj);
            let mirror = kernel(s)? * weight * STEP / PI;
            acc += (wj * Complex64::from_polar(1.0, -tj * l) + mirror * Complex64::from_polar(1.0, tj * l)) * 0.5;
        }
        let scale = (-self.c * l).exp();
        Ok((self.residue + scale * acc.re, scale * acc.im))
    }
}

/// `V(x)` by direct quadrature, abscissa `1` for `x ≥ 1` and `-1/4` below.
pub fn v_of_x(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::PreconditionViolated(format!("V needs x > 0, got {x}")));
    }
    v_of_x_at(x, if x >= 1.0 { 1.0 } else { -0.25 })
}

/// `V(x)` on the line `Re s = c`, with the internal imaginary-part check.
pub fn v_of_x_at(x: f64, c: f64) -> Result<f64> {
    let quad = VQuadrature::new(c)?;
    let (v, im) = quad.eval_two_sided(x)?;
    if im.abs() > 1e-12 {
        return Err(Error::QuadratureNotConverged(format!(
            "imaginary residue {im:e} at x = {x}"
        )));
    }
    Ok(v)
}

/// Residues at `s = 0` and the double pole `s = -1/2`; error `O(x^{5/2} ln x)`.
pub fn v_small_x(x: f64) -> f64 {
    let px = PI * x;
    1.0 - 8.0 * px.sqrt() / (GAMMA_QUARTER * GAMMA_QUARTER) * (2.0 - EULER_GAMMA - px.ln())
}

/// Grid and quadrature parameters, recorded in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VTableParams {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub step: f64,
    pub height_right: f64,
    pub height_left: f64,
    pub abscissa_right: f64,
    pub abscissa_left: f64,
    pub weight: String,
}

/// `V` tabulated on a geometric grid, cubic Hermite in `ln x`.
#[derive(Clone, Debug)]
pub struct VTable {
    l_min: f64,
    dl: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
    params: VTableParams,
}

impl VTable {
    pub const DEFAULT_POINTS: usize = 4096;
    pub const DEFAULT_X_MIN: f64 = 1e-8;
    pub const DEFAULT_X_MAX: f64 = 100.0;

    pub fn new() -> Result<Self> {
        Self::with_grid(Self::DEFAULT_X_MIN, Self::DEFAULT_X_MAX, Self::DEFAULT_POINTS)
    }

    pub fn with_grid(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min > 0.0 && x_max > x_min && points >= 2) {
            return Err(Error::PreconditionViolated(format!(
                "bad V grid [{x_min}, {x_max}] with {points} points"
            )));
        }
        let right = VQuadrature::new(1.0)?;
        let left = VQuadrature::new(-0.25)?;
        let l_min = x_min.ln();
        let dl = (x_max.ln() - l_min) / (points - 1) as f64;
        let (values, derivs): (Vec<f64>, Vec<f64>) = (0..points)
            .into_par_iter()
            .map(|i| {
                let x = (l_min + i as f64 * dl).exp();
                if x >= 1.0 {
                    right.eval_with_derivative(x)
                } else {
                    left.eval_with_derivative(x)
                }
            })
            .unzip();
        Ok(VTable {
            l_min,
            dl,
            values,
            derivs,
            params: VTableParams {
                x_min,
                x_max,
                points,
                step: STEP,
                height_right: right.height(),
                height_left: left.height(),
                abscissa_right: 1.0,
                abscissa_left: -0.25,
                weight: "G(s) = 1".into(),
            },
        })
    }

    pub fn params(&self) -> &VTableParams {
        &self.params
    }

    pub fn grid_values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolated `V(x)`; `0` above the grid, residue expansion below.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x >= self.params.x_max {
            return if x == self.params.x_max { *self.values.last().unwrap() } else { 0.0 };
        }
        if x < self.params.x_min {
            return v_small_x(x);
        }
        let u = (x.ln() - self.l_min) / self.dl;
        let i = (u as usize).min(self.values.len() - 2);
        let t = u - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.derivs[i] * self.dl, self.derivs[i + 1] * self.dl);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }
}
