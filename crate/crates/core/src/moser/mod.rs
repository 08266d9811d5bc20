//! Exponential functionals, Moser concentrating sequences and the sharp
//! exponent `μ₀`.

mod halfline;
mod luxemburg;
mod optimize;
mod profile;
mod sequence;

pub use halfline::{
    composite_norm, critical_k1_sweep, extend_ramp, halfline_identity, halfline_transform, in_k_tilde, CriticalRow,
    HalfLineFunction, Ramp, RAMP_HORIZON,
};
pub use luxemburg::{luxemburg_norm, luxemburg_norm_with, Phi};
pub use optimize::{maximize_lmu, MaximizeConfig, MaximizeReport};
pub use profile::{profile_phi, profile_slope_sup, MoserSequence, Polynomial, Profile};
pub use sequence::{blowup_table, moser_functional_sequence, sequence_norm_report, BlowupRow, SequenceNormReport};

use crate::error::{invalid, Result};
use crate::functions::{Eval, RadialFunction};
use crate::operators::coefficient_table;
use crate::quadrature::integrate_weighted;
use crate::special::factorial;
use std::sync::Arc;

/// Relative tolerance of exponential functionals.
pub const FUNCTIONAL_TOL: f64 = 1e-11;

/// `μ₀ = (θ+1) [(k−1)!]^{p/(p−1)}`.
pub fn mu0(theta: f64, k: usize, p: f64) -> Result<f64> {
    if !(theta > -1.0) || !(p > 1.0) || k == 0 {
        return invalid(format!("μ₀ needs θ > −1, p > 1, k >= 1 (got θ={theta}, p={p}, k={k})"));
    }
    Ok((theta + 1.0) * factorial(k - 1).powf(p / (p - 1.0)))
}

/// `∫_0^R exp(μ |u|^{p'}) r^θ dr`.
pub fn moser_functional(u: &RadialFunction, mu: f64, p: f64, theta: f64) -> Result<f64> {
    moser_functional_with_tol(u, mu, p, theta, FUNCTIONAL_TOL)
}

pub fn moser_functional_with_tol(u: &RadialFunction, mu: f64, p: f64, theta: f64, tol: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(theta > -1.0) || !(p > 1.0) {
        return invalid(format!("need μ >= 0, θ > −1, p > 1 (got μ={mu}, θ={theta}, p={p})"));
    }
    let q = p / (p - 1.0);
    let f = u.derivative_fn(0)?;
    integrate_weighted(|r| (mu * f(r).abs().powf(q)).exp(), theta, u.radius(), tol)
}

/// `Δ_γ^n ψ = r^{−2n} Σ_i c_{i,n} (log m)^{−i} H^(i)(log(R/r)/log m)`.
pub fn iterated_laplacian_psi(seq: &MoserSequence, gamma: f64, n: usize) -> Result<RadialFunction> {
    if seq.profile().max_order() < 2 * n {
        return invalid(format!(
            "Δ^{n} needs {} profile derivatives, {} available",
            2 * n,
            seq.profile().max_order()
        ));
    }
    let c = coefficient_table(gamma, n).pop().unwrap();
    let s = seq.clone();
    let f: Eval = Arc::new(move |r: f64| {
        let t = s.t(r);
        let mut acc = if c[0] != 0.0 { c[0] * s.profile().h(0, t) } else { 0.0 };
        let mut lp = 1.0;
        for (i, ci) in c.iter().enumerate().skip(1) {
            lp /= s.log_m();
            acc += ci * lp * s.profile().h(i, t);
        }
        acc * r.powi(-2 * n as i32)
    });
    RadialFunction::new(seq.radius(), vec![f])
}
