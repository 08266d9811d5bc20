use crate::error::{invalid, Error, Result};
use crate::functions::RadialFunction;
use crate::quadrature::integrate_weighted;

/// Young function used in the Luxemburg norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Phi {
    /// `exp(|t|^{p'}) − 1`.
    #[default]
    Normalized,
    /// `exp(|t|^{p'})`, for inspection only: the defining set is empty when `R^{θ+1}/(θ+1) > 1`.
    Literal,
}

const DELTA_MIN: f64 = 1e-9;
const DELTA_MAX: f64 = 1e9;
const TOL: f64 = 1e-12;

/// `inf { δ > 0 : ∫ Φ(u/δ) r^θ dr <= 1 }` with the normalized `Φ`.
pub fn luxemburg_norm(u: &RadialFunction, theta: f64, p: f64) -> Result<f64> {
    luxemburg_norm_with(u, theta, p, Phi::Normalized)
}

pub fn luxemburg_norm_with(u: &RadialFunction, theta: f64, p: f64, phi: Phi) -> Result<f64> {
    if !(theta > -1.0) || !(p > 1.0) {
        return invalid(format!("need θ > −1 and p > 1, got θ={theta}, p={p}"));
    }
    let q = p / (p - 1.0);
    let f = u.derivative_fn(0)?;
    let radius = u.radius();
    let mass = integrate_weighted(|r| f(r).abs(), theta, radius, TOL)?;
    if mass == 0.0 && phi == Phi::Normalized {
        return Ok(0.0);
    }
    let shift = if phi == Phi::Normalized { 1.0 } else { 0.0 };
    // true when δ is admissible; divergent integrals count as inadmissible
    let admissible = |delta: f64| -> bool {
        let g = |r: f64| {
            let x = (f(r).abs() / delta).powf(q);
            if shift == 1.0 { x.exp_m1() } else { x.exp() }
        };
        matches!(integrate_weighted(g, theta, radius, TOL), Ok(v) if v.is_finite() && v <= 1.0)
    };
    if !admissible(DELTA_MAX) || admissible(DELTA_MIN) {
        return Err(Error::Iteration(format!("no Luxemburg bracket within [{DELTA_MIN:e}, {DELTA_MAX:e}]")));
    }
    let (mut lo, mut hi) = (DELTA_MIN.ln(), DELTA_MAX.ln());
    while hi - lo > 1e-15 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if admissible(mid.exp()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.exp())
}
