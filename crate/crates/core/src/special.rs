//! Gamma-function helpers with sign tracking.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// `ln|Γ(x)|` together with the sign of `Γ(x)`. Fails at the poles `x = 0, -1, -2, ...`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of {x}")));
    }
    if x > 0.0 {
        return Ok((ln_gamma(x), 1.0));
    }
    if x == x.floor() {
        return Err(Error::Pole(x));
    }
    // reflection: Γ(x)Γ(1-x) = π / sin(πx)
    let s = (PI * x).sin();
    let lg = PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    Ok((lg, s.signum()))
}

/// `Γ(x)` via the signed logarithm.
pub fn gamma(x: f64) -> Result<f64> {
    let (lg, s) = ln_gamma_signed(x)?;
    Ok(s * lg.exp())
}

/// `Π Γ(num_i) / Π Γ(den_i)` evaluated in log space.
///
/// A pole in the numerator is an error; a pole in the denominator makes the
/// ratio zero.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut num = num.to_vec();
    let mut den = den.to_vec();
    num.retain(|x| match den.iter().position(|y| y == x) {
        Some(i) => {
            den.swap_remove(i);
            false
        }
        None => true,
    });
    let mut lg = 0.0;
    let mut sign = 1.0;
    for &x in &num {
        let (l, s) = ln_gamma_exact(x)?;
        lg += l;
        sign *= s;
    }
    if den.iter().any(|&x| x <= 0.0 && x == x.floor()) {
        return Ok(0.0);
    }
    for &x in &den {
        let (l, s) = ln_gamma_exact(x)?;
        lg -= l;
        sign *= s;
    }
    Ok(sign * lg.exp())
}

/// Like [`ln_gamma_signed`], exact at small positive integers.
fn ln_gamma_exact(x: f64) -> Result<(f64, f64)> {
    if x >= 1.0 && x <= 20.0 && x == x.floor() {
        return Ok((factorial(x as usize - 1).ln(), 1.0));
    }
    ln_gamma_signed(x)
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
