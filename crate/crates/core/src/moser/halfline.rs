use super::moser_functional;
use crate::error::{invalid, Error, Result};
use crate::functions::{Eval, RadialFunction};
use crate::quadrature::{integrate_interval, integrate_smooth};
use crate::spaces::{sobolev_norm, SpaceParams};
use std::sync::Arc;

const TOL: f64 = 1e-12;
const MEMBERSHIP_SAMPLES: usize = 2000;

/// Function on `[0, ∞)` together with its derivative.
#[derive(Clone)]
pub struct HalfLineFunction {
    value: Eval,
    slope: Eval,
}

impl std::fmt::Debug for HalfLineFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HalfLineFunction").field("w(0)", &(self.value)(0.0)).finish()
    }
}

impl HalfLineFunction {
    pub fn new(value: Eval, slope: Eval) -> Self {
        HalfLineFunction { value, slope }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn slope(&self, t: f64) -> f64 {
        (self.slope)(t)
    }
}

/// `w(t) = (θ+1)^{(p−1)/p} u(R e^{−t/(θ+1)})`.
pub fn halfline_transform(u: &RadialFunction, theta: f64, p: f64) -> Result<HalfLineFunction> {
    if !(theta > -1.0) || !(p > 1.0) {
        return invalid(format!("need θ > −1 and p > 1, got θ={theta}, p={p}"));
    }
    let c = (theta + 1.0).powf((p - 1.0) / p);
    let radius = u.radius();
    let f = u.derivative_fn(0)?;
    let value: Eval = Arc::new(move |t: f64| c * f(radius * (-t / (theta + 1.0)).exp()));
    let slope: Eval = match u.derivative_fn(1) {
        Ok(df) => Arc::new(move |t: f64| {
            let r = radius * (-t / (theta + 1.0)).exp();
            -c * df(r) * r / (theta + 1.0)
        }),
        Err(_) => Arc::new(|_| f64::NAN),
    };
    Ok(HalfLineFunction { value, slope })
}

/// Both sides of `∫_{r_T}^R e^{(θ+1)|u|^{p'}} r^θ dr = R^{θ+1}/(θ+1) ∫_0^T e^{|w|^{p'} − t} dt`,
/// `r_T = R e^{−T/(θ+1)}`. The left side is integrated in `r`, the right in `t`.
pub fn halfline_identity(u: &RadialFunction, theta: f64, p: f64, t_max: f64) -> Result<(f64, f64)> {
    let w = halfline_transform(u, theta, p)?;
    let q = p / (p - 1.0);
    let radius = u.radius();
    let f = u.derivative_fn(0)?;
    let r_t = radius * (-t_max / (theta + 1.0)).exp();
    let lhs = integrate_interval(|r| ((theta + 1.0) * f(r).abs().powf(q)).exp(), theta, r_t, radius, TOL)?;
    let mut rhs = 0.0;
    let mut a = 0.0;
    while a < t_max {
        let b = (a + 1.0).min(t_max);
        rhs += integrate_smooth(|t| (w.value(t).abs().powf(q) - t).exp(), a, b, TOL)?;
        a = b;
    }
    Ok((lhs, radius.powf(theta + 1.0) / (theta + 1.0) * rhs))
}

/// `∫_0^∞ g`, summed over dyadic pieces until the tail is negligible or `t_end` is reached.
fn halfline_integral(g: impl Fn(f64) -> f64, t_end: f64) -> Result<f64> {
    let mut total = integrate_smooth(&g, 0.0, 1.0, TOL)?;
    let mut a = 1.0;
    let mut quiet = 0;
    while 2.0 * a <= t_end {
        let piece = integrate_smooth(&g, a, 2.0 * a, TOL)?;
        total += piece;
        quiet = if piece.abs() <= 1e-15 * total.abs() { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok(total);
        }
        a *= 2.0;
    }
    Err(Error::NotConverged { estimate: total, error_bound: f64::NAN })
}

/// `t` beyond which `R e^{−t/(θ+1)}` leaves the normal range, per unit of `θ+1`.
const UNDERFLOW_T: f64 = 700.0;

/// `(R^{α₀+1}/(θ+1)^p ∫|w|^p e^{−(α₀+1)t/(θ+1)} dt + ∫|w'|^p dt)^{1/p}`, the norm of
/// `X^{1,p}_R(α₀, p−1)` in half-line variables.
pub fn composite_norm(w: &HalfLineFunction, alpha0: f64, theta: f64, p: f64, radius: f64) -> Result<f64> {
    let end = UNDERFLOW_T * (theta + 1.0);
    let zero = halfline_integral(|t| w.value(t).abs().powf(p) * (-(alpha0 + 1.0) * t / (theta + 1.0)).exp(), end)?;
    let one = halfline_integral(|t| w.slope(t).abs().powf(p), end)?;
    Ok((radius.powf(alpha0 + 1.0) / (theta + 1.0).powf(p) * zero + one).powf(1.0 / p))
}

/// `w >= 0` and `w(0) <= A w(t)` on `[0, t_max]`, checked on uniform samples.
pub fn in_k_tilde(w: &HalfLineFunction, a: f64, t_max: f64) -> bool {
    let w0 = w.value(0.0);
    (0..=MEMBERSHIP_SAMPLES).all(|i| {
        let v = w.value(t_max * i as f64 / MEMBERSHIP_SAMPLES as f64);
        v >= 0.0 && w0 <= a * v * (1.0 + 1e-14)
    })
}

/// Linear ramp of length `C₁` prepended to `w`.
#[derive(Debug, Clone)]
pub struct Ramp {
    /// `C₁ = (θ+1) [(α₀+1) A^p / R^{α₀+1}]^{1/(p−1)}`.
    pub c1: f64,
    pub base: HalfLineFunction,
    p: f64,
    horizon: f64,
}

impl Ramp {
    pub fn value(&self, t: f64) -> f64 {
        if t <= self.c1 {
            self.base.value(0.0) * t / self.c1
        } else {
            self.base.value(t - self.c1)
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        if t <= self.c1 {
            self.base.value(0.0) / self.c1
        } else {
            self.base.slope(t - self.c1)
        }
    }

    pub fn as_halfline(&self) -> HalfLineFunction {
        let (a, b) = (self.clone(), self.clone());
        HalfLineFunction::new(Arc::new(move |t| a.value(t)), Arc::new(move |t| b.slope(t)))
    }

    /// `|w(0)|^p / C₁^{p−1}`.
    pub fn ramp_energy(&self) -> f64 {
        self.base.value(0.0).abs().powf(self.p) / self.c1.powf(self.p - 1.0)
    }

    /// `∫_0^∞ |w̃'|^p`, summed as ramp part plus `∫|w'|^p`.
    pub fn energy(&self) -> Result<f64> {
        let p = self.p;
        Ok(self.ramp_energy() + halfline_integral(|t| self.base.slope(t).abs().powf(p), self.horizon)?)
    }
}

/// Membership horizon in `t` for [`extend_ramp`].
pub const RAMP_HORIZON: f64 = 60.0;

pub fn extend_ramp(w: &HalfLineFunction, a: f64, theta: f64, alpha0: f64, p: f64, radius: f64) -> Result<Ramp> {
    if !(a > 0.0) || !(theta > -1.0) || !(alpha0 > -1.0) || !(p > 1.0) || !(radius > 0.0) {
        return invalid("extend_ramp needs A > 0, θ > −1, α₀ > −1, p > 1, R > 0");
    }
    if !in_k_tilde(w, a, RAMP_HORIZON * (theta + 1.0)) {
        return Err(Error::Domain(format!("w is not in the cone K_A for A = {a}")));
    }
    let c1 = (theta + 1.0) * ((alpha0 + 1.0) * a.powf(p) / radius.powf(alpha0 + 1.0)).powf(1.0 / (p - 1.0));
    Ok(Ramp { c1, base: w.clone(), p, horizon: UNDERFLOW_T * (theta + 1.0) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRow {
    pub name: String,
    pub radius: f64,
    /// `‖u‖_{X^{1,p}_R(α₀,p−1)}` before normalization; infinite for members outside the space.
    pub raw_norm: f64,
    pub admissible: bool,
    /// `∫ e^{(θ+1)|u|^{p'}} r^θ dr / R^{θ+1}` at the normalized `u`.
    pub value: f64,
}

/// `u >= 0` and `u(R) <= A u(r)` on 2000 geometric samples of `[R·1e−12, R]`.
fn in_k_a(u: &RadialFunction, a: f64) -> bool {
    let radius = u.radius();
    let ur = u.value(radius);
    (0..=MEMBERSHIP_SAMPLES).all(|i| {
        let r = radius * 1e-12f64.powf(i as f64 / MEMBERSHIP_SAMPLES as f64);
        let v = u.value(r);
        v >= 0.0 && ur <= a * v * (1.0 + 1e-14)
    })
}

/// Critical functional `μ = θ+1` over a corpus normalized in `X^{1,p}_R(α₀, p−1)`.
pub fn critical_k1_sweep(
    a: f64,
    theta: f64,
    alpha0: f64,
    p: f64,
    corpus: &[(String, RadialFunction)],
) -> Result<Vec<CriticalRow>> {
    if !(p >= 2.0) {
        return invalid(format!("critical sweep needs p >= 2, got {p}"));
    }
    corpus
        .iter()
        .map(|(name, u)| {
            let radius = u.radius();
            let space = SpaceParams::new(1, p, radius, vec![alpha0, p - 1.0], theta)?;
            let raw_norm = match sobolev_norm(u, &space) {
                Ok(n) => n,
                Err(Error::Divergent(_)) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            let admissible = raw_norm.is_finite() && in_k_a(u, a);
            let value = if !admissible {
                f64::NAN
            } else {
                let v = if raw_norm > 0.0 { u.scaled(1.0 / raw_norm) } else { u.clone() };
                moser_functional(&v, theta + 1.0, p, theta)? / radius.powf(theta + 1.0)
            };
            Ok(CriticalRow { name: name.clone(), radius, raw_norm, admissible, value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{k1_corpus, smooth_k1_corpus};

    #[test]
    fn transform_endpoint_and_zero() {
        let u = RadialFunction::polynomial(2.0, &[3.0, -1.0], 1).unwrap();
        let w = halfline_transform(&u, 1.0, 2.0).unwrap();
        assert!((w.value(0.0) - 2f64.sqrt()).abs() < 1e-15);
        let z = RadialFunction::polynomial(2.0, &[0.0], 1).unwrap();
        let (l, r) = halfline_identity(&z, 1.0, 2.0, 10.0).unwrap();
        let vol = 2.0;
        assert!((l - vol * (1.0 - (-10.0f64).exp())).abs() < 1e-12);
        assert!((l - r).abs() < 1e-12 * l);
    }

    #[test]
    fn log_maps_to_identity_and_sides_agree() {
        let u = RadialFunction::new(
            1.0,
            vec![Arc::new(|r: f64| -r.ln()) as Eval, Arc::new(|r: f64| -1.0 / r) as Eval],
        )
        .unwrap();
        let w = halfline_transform(&u, 0.0, 2.0).unwrap();
        assert!((w.value(3.7) - 3.7).abs() < 1e-14);
        assert!((w.slope(3.7) - 1.0).abs() < 1e-14);
        let (l, r) = halfline_identity(&u, 0.0, 2.0, 4.0).unwrap();
        assert!((l - r).abs() < 1e-8 * l, "{l} vs {r}");
    }

    #[test]
    fn identity_holds_on_corpus() {
        for (name, u) in smooth_k1_corpus(1.5).unwrap() {
            for &(theta, p) in &[(0.0, 2.0), (1.0, 3.0)] {
                let v = u.scaled(0.5);
                let (l, r) = halfline_identity(&v, theta, p, 12.0).unwrap();
                assert!((l - r).abs() < 1e-8 * l, "{name} θ={theta}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn c1_formula_example() {
        let w = HalfLineFunction::new(Arc::new(|_| 1.0), Arc::new(|_| 0.0));
        let ramp = extend_ramp(&w, 1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert!((ramp.c1 - 4.0).abs() < 1e-15);
        assert!((ramp.ramp_energy() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ramp_without_boundary_value_is_a_shift() {
        let w = HalfLineFunction::new(Arc::new(|t: f64| t * t), Arc::new(|t: f64| 2.0 * t));
        let ramp = extend_ramp(&w, 2.0, 0.0, 0.0, 2.0, 1.0).unwrap();
        assert_eq!(ramp.value(ramp.c1 + 0.5), 0.25);
        assert_eq!(ramp.value(0.3), 0.0);
    }

    #[test]
    fn ramp_rejects_cone_violation() {
        let w = HalfLineFunction::new(Arc::new(|t: f64| 1.0 - 0.9 * t.min(1.0)), Arc::new(|_| 0.0));
        assert!(extend_ramp(&w, 1.0, 0.0, 0.0, 2.0, 1.0).is_err());
        assert!(extend_ramp(&w, 10.0, 0.0, 0.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn composite_norm_matches_sobolev_norm() {
        for (name, u) in k1_corpus(1.0).unwrap() {
            // kinked members and tails reaching past the underflow horizon are excluded
            if matches!(name.as_str(), "moser" | "sqrt-log" | "log-log") {
                continue;
            }
            let (theta, alpha0, p) = (0.5, 0.2, 2.0);
            let w = halfline_transform(&u, theta, p).unwrap();
            let a = composite_norm(&w, alpha0, theta, p, 1.0).unwrap();
            let space = SpaceParams::new(1, p, 1.0, vec![alpha0, p - 1.0], theta).unwrap();
            let b = sobolev_norm(&u, &space).unwrap();
            assert!((a - b).abs() < 1e-8 * b.max(1e-300) + 1e-300, "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn critical_sweep_zero_row() {
        let corpus = k1_corpus(1.0).unwrap();
        let rows = critical_k1_sweep(1.0, 0.5, 0.0, 2.0, &corpus[..1]).unwrap();
        assert!((rows[0].value - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_over_the_corpus() {
        for radius in [0.5, 1.0, 2.0] {
            let rows = critical_k1_sweep(1.0, 0.0, 0.0, 2.0, &k1_corpus(radius).unwrap()).unwrap();
            for r in &rows {
                if r.raw_norm.is_finite() {
                    assert!(r.admissible, "{} at R={radius}", r.name);
                    assert!(r.value.is_finite() && r.value > 0.0 && r.value < 100.0, "{}: {}", r.name, r.value);
                } else {
                    assert!(!r.admissible && r.value.is_nan());
                }
            }
            let get = |n: &str| rows.iter().find(|r| r.name == n).unwrap();
            assert!(get("affine").admissible && get("moser").admissible);
            assert!(get("sqrt-log").raw_norm.is_infinite());
        }
    }
}
