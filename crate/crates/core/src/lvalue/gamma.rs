//! Complex log-gamma and the archimedean factor `γ(s) = π^{-s/2} Γ(s/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `Γ(1/4)`.
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

/// `ψ(1/4) = -γ - π/2 - 3 ln 2`.
pub const DIGAMMA_QUARTER: f64 = -EULER_GAMMA - PI / 2.0 - 3.0 * std::f64::consts::LN_2;

/// `B_{2n} / (2n (2n-1))` for `n = 1..=10`.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT: f64 = 16.0;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `ln Γ(z)` on the branch continuous from the positive real axis along
/// horizontal lines; only `exp` of it is meaningful off that axis.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::PoleInput);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    Ok((w - 0.5) * w.ln() - w + half_ln_2pi + series - shift)
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_real needs x > 0");
    ln_gamma(Complex64::new(x, 0.0)).expect("x > 0").re
}

/// `γ(s) = π^{-s/2} Γ(s/2)`.
pub fn gamma_factor(s: Complex64) -> Result<Complex64> {
    let lg = ln_gamma(s / 2.0)?;
    Ok((lg - s / 2.0 * PI.ln()).exp())
}
