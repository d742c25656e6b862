//! `|L(1/2,χ)|²` for primitive even `χ` from the approximate functional equation
//! `2 Σ_{m,n} χ(m) χ̄(n) V(mn/q) / √(mn)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::vfunc::VTable;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::modarith::{mod_inv, CompensatedSum, ComplexSum};

/// Smallest admissible `T / q`.
pub const MIN_CUTOFF_FACTOR: u64 = 60;

/// An AFE evaluation with its truncation metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AfeResult {
    pub value: f64,
    pub imag: f64,
    pub cutoff: u64,
    pub tail_estimate: f64,
}

fn check_cutoff(q: u64, cutoff: u64) -> Result<()> {
    if cutoff < MIN_CUTOFF_FACTOR * q {
        return Err(Error::PreconditionViolated(format!(
            "cutoff {cutoff} is below {MIN_CUTOFF_FACTOR}·q = {}",
            MIN_CUTOFF_FACTOR * q
        )));
    }
    Ok(())
}

/// `2 Σ_{t > T} τ(t) |V(t/q)| / √t`, with `τ(t)` replaced by `ln t + 1`.
pub fn tail_estimate(q: u64, cutoff: u64, vt: &VTable) -> f64 {
    let lo = (cutoff as f64 / q as f64).ln();
    let hi = vt.params().x_max.ln();
    if lo >= hi {
        return 0.0;
    }
    let steps = 2000;
    let h = (hi - lo) / steps as f64;
    let qf = q as f64;
    // t = q e^u, dt = t du.
    let f = |u: f64| {
        let t = qf * u.exp();
        (t.ln() + 1.0) * vt.eval(u.exp()).abs() * t.sqrt()
    };
    let mut s = 0.5 * (f(lo) + f(hi));
    for i in 1..steps {
        s += f(lo + i as f64 * h);
    }
    2.0 * s * h
}

fn weights(q: u64, cutoff: u64, vt: &VTable) -> Vec<f64> {
    let qf = q as f64;
    (0..=cutoff)
        .into_par_iter()
        .map(|t| if t == 0 { 0.0 } else { vt.eval(t as f64 / qf) / (t as f64).sqrt() })
        .collect()
}

/// The divisor-convolution route for one character: `c(t) = Σ_{m | t} χ(m) χ̄(t/m)`
/// for `t ≤ T`, then `2 Σ_t c(t) V(t/q)/√t`.
pub fn afe_moment_term(chi: &DirichletCharacter, vt: &VTable, cutoff: u64) -> Result<AfeResult> {
    let q = chi.modulus();
    if q <= 1 || !chi.is_primitive() || !chi.is_even() {
        return Err(Error::NotPrimitiveEven);
    }
    check_cutoff(q, cutoff)?;
    let e = chi.group().exponent();
    let roots = chi.group().roots();
    let idx = chi.index_table();
    let t_max = cutoff as usize;
    let mut coeff = vec![Complex64::new(0.0, 0.0); t_max + 1];
    for m in 1..=t_max {
        let Some(im) = idx[m % q as usize] else { continue };
        for n in 1..=t_max / m {
            if let Some(inn) = idx[n % q as usize] {
                coeff[m * n] += roots[((im + e - inn) % e) as usize];
            }
        }
    }
    let w = weights(q, cutoff, vt);
    let mut sum = ComplexSum::new();
    for t in 1..=t_max {
        sum.add(coeff[t] * w[t]);
    }
    let total = sum.value() * 2.0;
    Ok(AfeResult {
        value: total.re,
        imag: total.im,
        cutoff,
        tail_estimate: tail_estimate(q, cutoff, vt),
    })
}

/// Ratio-class form of the AFE for a whole modulus:
/// `H(c) = Σ_{mn ≤ T, m ≡ cn (q)} V(mn/q)/√(mn)`, so that
/// `|L(1/2,χ)|² ≈ 2 Σ_c χ(c) H(c)` for every primitive even `χ` mod `q`.
#[derive(Clone, Debug)]
pub struct AfeKernel {
    q: u64,
    cutoff: u64,
    h: Vec<f64>,
    tail: f64,
}

/// Fixed number of work chunks, so sums do not depend on the thread count.
const CHUNKS: usize = 64;

impl AfeKernel {
    pub fn new(q: u64, vt: &VTable, cutoff: u64) -> Result<Self> {
        check_cutoff(q, cutoff)?;
        let qs = q as usize;
        let inv: Vec<Option<usize>> = (0..q)
            .map(|r| mod_inv(r as i64, q).ok().map(|v| v as usize))
            .collect();
        let w = weights(q, cutoff, vt);
        let t_max = cutoff as usize;
        // Work for row m is about T/m; cut rows into chunks of equal work.
        let total: f64 = (1..=t_max).map(|m| 1.0 / m as f64).sum();
        let mut bounds = vec![1usize];
        let mut acc = 0.0;
        for m in 1..=t_max {
            acc += 1.0 / m as f64;
            if acc >= total * bounds.len() as f64 / CHUNKS as f64 && bounds.len() < CHUNKS {
                bounds.push(m + 1);
            }
        }
        bounds.push(t_max + 1);
        bounds.dedup();
        let partials: Vec<Vec<f64>> = bounds
            .par_windows(2)
            .map(|b| {
                let mut h = vec![0.0; qs];
                for m in b[0]..b[1] {
                    let rm = m % qs;
                    if inv[rm].is_none() {
                        continue;
                    }
                    for n in 1..=t_max / m {
                        if let Some(ninv) = inv[n % qs] {
                            h[rm * ninv % qs] += w[m * n];
                        }
                    }
                }
                h
            })
            .collect();
        let mut h = vec![0.0; qs];
        for p in &partials {
            for (a, b) in h.iter_mut().zip(p) {
                *a += b;
            }
        }
        Ok(AfeKernel {
            q,
            cutoff,
            h,
            tail: tail_estimate(q, cutoff, vt),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn class_sums(&self) -> &[f64] {
        &self.h
    }

    pub fn evaluate(&self, chi: &DirichletCharacter) -> Result<AfeResult> {
        if chi.modulus() != self.q {
            return Err(Error::PreconditionViolated(format!(
                "AFE kernel for {} used with modulus {}",
                self.q,
                chi.modulus()
            )));
        }
        if self.q <= 1 || !chi.is_primitive() || !chi.is_even() {
            return Err(Error::NotPrimitiveEven);
        }
        let roots = chi.group().roots();
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (c, &hc) in self.h.iter().enumerate() {
            if hc == 0.0 {
                continue;
            }
            if let Some(k) = chi.eval_index(c as u64) {
                let z = roots[k as usize];
                re.add(z.re * hc);
                im.add(z.im * hc);
            }
        }
        Ok(AfeResult {
            value: 2.0 * re.value(),
            imag: 2.0 * im.value(),
            cutoff: self.cutoff,
            tail_estimate: self.tail,
        })
    }
}
