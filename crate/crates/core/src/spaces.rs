//! Weighted spaces `X^{k,p}_R(α_0, ..., α_k)`: regimes, norms, embeddings
//! and Hardy-type quantities.

use crate::error::{invalid, Error, Result};
use crate::functions::RadialFunction;
use crate::quadrature::{integrate_interval, integrate_weighted, Grid};

/// Default relative tolerance for norm integrals.
pub const NORM_TOL: f64 = 1e-10;

const REGIME_TOL: f64 = 1e-12;

/// Parameters `(k, p, R, α_0..α_k, θ)` of a weighted space and its target measure `r^θ dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceParams {
    pub k: usize,
    pub p: f64,
    pub radius: f64,
    pub alpha: Vec<f64>,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Sobolev,
    AdamsTrudingerMoser,
    Morrey,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Sobolev => "sobolev",
            Regime::AdamsTrudingerMoser => "adams-trudinger-moser",
            Regime::Morrey => "morrey",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Embedding {
    /// Critical Lebesgue exponent `p*`.
    Lebesgue(f64),
    /// Every finite exponent, with exponential integrability.
    Unbounded,
    /// Hölder exponent.
    Holder(f64),
}

impl SpaceParams {
    pub fn new(k: usize, p: f64, radius: f64, alpha: Vec<f64>, theta: f64) -> Result<Self> {
        if k == 0 {
            return invalid("order k must be at least 1");
        }
        if !(p >= 1.0) || !p.is_finite() {
            return invalid(format!("p must be at least 1, got {p}"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return invalid(format!("radius must be positive, got {radius}"));
        }
        if alpha.len() != k + 1 {
            return invalid(format!("expected {} weights, got {}", k + 1, alpha.len()));
        }
        if let Some(a) = alpha.iter().find(|a| !(**a > -1.0)) {
            return invalid(format!("weights must exceed -1, got {a}"));
        }
        if !(theta > -1.0) {
            return invalid(format!("theta must exceed -1, got {theta}"));
        }
        Ok(SpaceParams { k, p, radius, alpha, theta })
    }

    /// `σ = α_k − kp + 1`.
    pub fn sigma(&self) -> f64 {
        self.alpha[self.k] - self.k as f64 * self.p + 1.0
    }

    pub fn regime(&self) -> Regime {
        let s = self.sigma();
        if s.abs() <= REGIME_TOL {
            Regime::AdamsTrudingerMoser
        } else if s > 0.0 {
            Regime::Sobolev
        } else {
            Regime::Morrey
        }
    }

    /// Hölder conjugate `p' = p/(p−1)`.
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

fn lp_term(f: impl Fn(f64) -> f64, p: f64, weight: f64, radius: f64, tol: f64, order: usize) -> Result<f64> {
    integrate_weighted(|r| f(r).abs().powf(p), weight, radius, tol).map_err(|e| match e {
        Error::Divergent(m) => Error::Divergent(format!("term of order {order}: {m}")),
        Error::NotConverged { estimate, error_bound } => Error::Divergent(format!(
            "term of order {order} did not settle (estimate {estimate:e}, error bound {error_bound:e})"
        )),
        other => other,
    })
}

/// `∫ |u^(j)|^p r^{α_j} dr` for `j = 0..k`.
pub fn norm_terms(u: &RadialFunction, params: &SpaceParams, tol: f64) -> Result<Vec<f64>> {
    if u.order() < params.k {
        return invalid(format!("space of order {} needs {} derivatives, got {}", params.k, params.k, u.order()));
    }
    (0..=params.k)
        .map(|j| {
            let d = u.derivative_fn(j)?;
            lp_term(|r| d(r), params.p, params.alpha[j], params.radius, tol, j)
        })
        .collect()
}

/// `‖u‖ = (Σ_j ‖u^(j)‖^p_{L^p_{α_j}})^{1/p}`.
pub fn sobolev_norm(u: &RadialFunction, params: &SpaceParams) -> Result<f64> {
    sobolev_norm_with_tol(u, params, NORM_TOL)
}

pub fn sobolev_norm_with_tol(u: &RadialFunction, params: &SpaceParams, tol: f64) -> Result<f64> {
    let t = norm_terms(u, params, tol)?;
    Ok(t.iter().sum::<f64>().powf(1.0 / params.p))
}

/// `‖u‖_{L^q_θ}` on `(0, R]`.
pub fn lebesgue_norm(u: &RadialFunction, q: f64, theta: f64, tol: f64) -> Result<f64> {
    let f = u.derivative_fn(0)?;
    Ok(lp_term(|r| f(r), q, theta, u.radius(), tol, 0)?.powf(1.0 / q))
}

/// Critical embedding of the space into `L^q_θ`.
pub fn embedding_exponent(params: &SpaceParams) -> Embedding {
    let p = params.p;
    match params.regime() {
        Regime::Sobolev => Embedding::Lebesgue((params.theta + 1.0) * p / params.sigma()),
        Regime::AdamsTrudingerMoser => Embedding::Unbounded,
        Regime::Morrey => {
            let a = (params.alpha[params.k] + 1.0) / p;
            Embedding::Holder((1.0 + a.floor() - a).min(1.0 - 1.0 / p))
        }
    }
}

/// Sharp constant `p/(α−p+1)` of the one-dimensional weighted Hardy inequality.
pub fn hardy_constant(p: f64, alpha: f64) -> Result<f64> {
    let d = alpha - p + 1.0;
    if !(d > 0.0) {
        return invalid(format!("Hardy constant needs α − p + 1 > 0, got {d}"));
    }
    Ok(p / d)
}

/// `‖u‖_{L^p_{α−p}} / ‖u'‖_{L^p_α}`; zero when both vanish.
pub fn hardy_ratio(u: &RadialFunction, p: f64, alpha: f64, tol: f64) -> Result<f64> {
    let f = u.derivative_fn(0)?;
    let d = u.derivative_fn(1)?;
    let num = lp_term(|r| f(r), p, alpha - p, u.radius(), tol, 0)?;
    let den = lp_term(|r| d(r), p, alpha, u.radius(), tol, 1)?;
    if num == 0.0 && den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).powf(1.0 / p))
}

/// `(r/R)^{−a} − 1` with `a = (1−δ)(α−p+1)/p`, vanishing at `R`.
///
/// Its Hardy ratio tends to the sharp constant as `δ → 0`.
pub fn hardy_near_extremal(p: f64, alpha: f64, delta: f64, radius: f64) -> Result<RadialFunction> {
    let a = (1.0 - delta) * (alpha - p + 1.0) / p;
    if !(a > 0.0) || !(delta < 1.0) {
        return invalid(format!("near-extremal exponent must be positive, got {a}"));
    }
    let c = radius.powf(a);
    Ok(RadialFunction::power(radius, c, -a, 1)?.shifted(-1.0))
}

/// `‖u‖_{L^q_θ}` and `‖u‖_X` with every integral cut off at `r_min`.
///
/// Used to watch a quantity diverge as the resolution floor moves to the origin.
pub fn truncated_norms(u: &RadialFunction, params: &SpaceParams, q: f64, r_min: f64) -> Result<(f64, f64)> {
    if !(r_min > 0.0 && r_min < params.radius) {
        return invalid(format!("cutoff must lie in (0, R), got {r_min}"));
    }
    if u.order() < params.k {
        return invalid(format!("space of order {} needs {} derivatives", params.k, params.k));
    }
    let part = |j: usize, e: f64, w: f64| -> Result<f64> {
        let d = u.derivative_fn(j)?;
        integrate_interval(|r| d(r).abs().powf(e), w, r_min, params.radius, NORM_TOL)
    };
    let lq = part(0, q, params.theta)?.powf(1.0 / q);
    let mut x = 0.0;
    for j in 0..=params.k {
        x += part(j, params.p, params.alpha[j])?;
    }
    Ok((lq, x.powf(1.0 / params.p)))
}

/// Which end the functions in the Hardy inequality vanish at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardySide {
    /// `u(r) → 0` as `r → 0`.
    Origin,
    /// `u(R) = 0`.
    Boundary,
}

/// Admissibility of `‖u‖_{L^q_θ} ≤ C ‖u'‖_{L^p_α}` for the given side.
pub fn hardy_admissible(p: f64, q: f64, theta: f64, alpha: f64, side: HardySide) -> bool {
    let d = alpha - p + 1.0;
    let crit = (theta + 1.0) * p / d;
    match side {
        HardySide::Origin => {
            if p <= q {
                q >= crit && d < 0.0
            } else {
                q > crit && d < 0.0
            }
        }
        HardySide::Boundary => {
            if p <= q {
                (q <= crit && d > 0.0) || (theta > -1.0 && d <= 0.0)
            } else {
                (q < crit && d > 0.0) || (theta > -1.0 && d <= 0.0)
            }
        }
    }
}

/// Largest grid value of the pointwise decay bound divided by `‖u‖`.
///
/// Sobolev: `|u(t)| t^{σ/p}`. Adams–Trudinger–Moser:
/// `(|u(t)| − |log(t/R)|^{(p−1)/p} ‖u^(k)‖_{L^p_{α_k}})_+`.
pub fn pointwise_bound_ratio(u: &RadialFunction, params: &SpaceParams, grid: &Grid) -> Result<f64> {
    let terms = norm_terms(u, params, NORM_TOL)?;
    let norm = terms.iter().sum::<f64>().powf(1.0 / params.p);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let p = params.p;
    let sup = match params.regime() {
        Regime::Sobolev => {
            let e = params.sigma() / p;
            grid.nodes().iter().map(|&t| u.value(t).abs() * t.powf(e)).fold(0.0, f64::max)
        }
        Regime::AdamsTrudingerMoser => {
            let top = terms[params.k].powf(1.0 / p);
            let e = (p - 1.0) / p;
            grid.nodes()
                .iter()
                .map(|&t| (u.value(t).abs() - (t / params.radius).ln().abs().powf(e) * top).max(0.0))
                .fold(0.0, f64::max)
        }
        Regime::Morrey => return invalid("pointwise decay bound is not defined in the Morrey regime"),
    };
    Ok(sup / norm)
}

/// Hölder exponent `min{1 − (α_1+1)/p, 1 − 1/p}` for `k = 1`.
pub fn morrey_exponent(p: f64, alpha1: f64) -> f64 {
    (1.0 - (alpha1 + 1.0) / p).min(1.0 - 1.0 / p)
}

/// `max |u(r) − u(s)| / (|r − s|^γ ‖u'‖_{L^p_{α_1}})` over node pairs, `k = 1`.
pub fn morrey_ratio(u: &RadialFunction, grid: &Grid, params: &SpaceParams) -> Result<f64> {
    if params.k != 1 || params.regime() != Regime::Morrey {
        return invalid("Hölder ratio needs a first-order space in the Morrey regime");
    }
    let d = u.derivative_fn(1)?;
    let top = lp_term(|r| d(r), params.p, params.alpha[1], params.radius, NORM_TOL, 1)?.powf(1.0 / params.p);
    if top == 0.0 {
        return Ok(0.0);
    }
    let g = morrey_exponent(params.p, params.alpha[1]);
    let r = grid.nodes();
    let v: Vec<f64> = r.iter().map(|&x| u.value(x)).collect();
    let mut best: f64 = 0.0;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            best = best.max((v[j] - v[i]).abs() / (r[j] - r[i]).powf(g));
        }
    }
    Ok(best / top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn one_minus_r() -> RadialFunction {
        RadialFunction::polynomial(1.0, &[1.0, -1.0], 2).unwrap()
    }

    #[test]
    fn regimes() {
        let s = |k, p, a: Vec<f64>| SpaceParams::new(k, p, 1.0, a, 0.0).unwrap().regime();
        assert_eq!(s(1, 2.0, vec![0.0, 1.0]), Regime::AdamsTrudingerMoser);
        assert_eq!(s(2, 2.0, vec![0.0, 0.0, 3.0]), Regime::AdamsTrudingerMoser);
        assert_eq!(s(1, 2.0, vec![0.0, 2.0]), Regime::Sobolev);
        assert_eq!(s(1, 4.0, vec![0.0, 1.0]), Regime::Morrey);
    }

    #[test]
    fn invalid_params() {
        assert!(SpaceParams::new(1, 2.0, 1.0, vec![0.0], 0.0).is_err());
        assert!(SpaceParams::new(1, 2.0, 1.0, vec![-1.0, 0.0], 0.0).is_err());
        assert!(SpaceParams::new(1, 2.0, 0.0, vec![0.0, 0.0], 0.0).is_err());
        assert!(SpaceParams::new(1, 2.0, 1.0, vec![0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn norm_examples() {
        let sp = SpaceParams::new(1, 2.0, 1.0, vec![0.0, 0.0], 0.0).unwrap();
        let n = sobolev_norm(&one_minus_r(), &sp).unwrap();
        assert!((n - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let sp = SpaceParams::new(2, 2.0, 1.0, vec![0.0, 0.0, 0.0], 0.0).unwrap();
        let u = RadialFunction::polynomial(1.0, &[0.0, 0.0, 1.0], 2).unwrap();
        let n = sobolev_norm(&u, &sp).unwrap();
        assert!((n - (0.2f64 + 4.0 / 3.0 + 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn missing_derivatives_are_rejected() {
        let sp = SpaceParams::new(2, 2.0, 1.0, vec![0.0, 0.0, 0.0], 0.0).unwrap();
        let u = RadialFunction::polynomial(1.0, &[1.0, 1.0], 1).unwrap();
        assert!(sobolev_norm(&u, &sp).is_err());
    }

    #[test]
    fn divergent_terms_name_the_order() {
        let sp = SpaceParams::new(1, 2.0, 1.0, vec![0.0, 1.0], 0.0).unwrap();
        let u = RadialFunction::new(1.0, vec![Arc::new(|r: f64| -r.ln()), Arc::new(|r: f64| -1.0 / r)]).unwrap();
        match sobolev_norm(&u, &sp) {
            Err(Error::Divergent(m)) => assert!(m.contains("order 1"), "{m}"),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn embedding_examples() {
        let e = embedding_exponent(&SpaceParams::new(1, 1.0, 1.0, vec![0.0, 2.0], 1.0).unwrap());
        assert!(matches!(e, Embedding::Lebesgue(q) if (q - 1.0).abs() < 1e-14));
        let e = embedding_exponent(&SpaceParams::new(1, 2.0, 1.0, vec![0.0, 2.0], 3.0).unwrap());
        assert!(matches!(e, Embedding::Lebesgue(q) if (q - 8.0).abs() < 1e-14));
        let e = embedding_exponent(&SpaceParams::new(1, 2.0, 1.0, vec![0.0, 1.0], 0.0).unwrap());
        assert_eq!(e, Embedding::Unbounded);
        let e = embedding_exponent(&SpaceParams::new(1, 4.0, 1.0, vec![0.0, 1.0], 0.0).unwrap());
        assert!(matches!(e, Embedding::Holder(g) if (g - 0.5).abs() < 1e-14));
    }

    #[test]
    fn hardy_constants() {
        assert_eq!(hardy_constant(2.0, 3.0).unwrap(), 1.0);
        assert_eq!(hardy_constant(2.0, 5.0).unwrap(), 0.5);
        assert_eq!(hardy_constant(3.0, 4.0).unwrap(), 1.5);
        assert!(hardy_constant(2.0, 1.0).is_err());
    }

    #[test]
    fn hardy_ratio_example() {
        let r = hardy_ratio(&one_minus_r(), 2.0, 3.0, 1e-12).unwrap();
        assert!((r - (1.0f64 / 3.0).sqrt()).abs() < 1e-11);
        let zero = RadialFunction::polynomial(1.0, &[0.0], 1).unwrap();
        assert_eq!(hardy_ratio(&zero, 2.0, 3.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn hardy_admissibility_cases() {
        use HardySide::*;
        // boundary side, α − p + 1 = 2 > 0, critical q = (θ+1)p/2
        assert!(hardy_admissible(2.0, 2.0, 1.0, 3.0, Boundary));
        assert!(!hardy_admissible(2.0, 3.0, 1.0, 3.0, Boundary));
        assert!(hardy_admissible(2.0, 0.4, 0.0, 5.0, Boundary));
        assert!(!hardy_admissible(2.0, 1.5, 0.0, 5.0, Boundary));
        assert!(hardy_admissible(2.0, 9.0, 0.5, 1.0, Boundary));
        // origin side needs α − p + 1 < 0
        assert!(!hardy_admissible(2.0, 2.0, 1.0, 3.0, Origin));
        assert!(hardy_admissible(2.0, 2.0, 1.0, 0.0, Origin));
        assert!(hardy_admissible(2.0, 1.5, 1.0, 0.0, Origin));
        assert!(!hardy_admissible(2.0, 1.5, 1.0, 1.0, Origin));
    }

    #[test]
    fn morrey_example() {
        let sp = SpaceParams::new(1, 4.0, 1.0, vec![0.0, 1.0], 0.0).unwrap();
        let g = build_grid(1.0, 200, 1.0).unwrap();
        let u = RadialFunction::polynomial(1.0, &[0.0, 1.0], 1).unwrap();
        let r = morrey_ratio(&u, &g, &sp).unwrap();
        let span: f64 = 1.0 - 1.0 / 200.0;
        let want = span.powf(0.5) / 0.5f64.powf(0.25);
        assert!((r - want).abs() < 1e-10, "{r} vs {want}");
    }

    #[test]
    fn near_extremal_family_approaches_constant() {
        for (p, alpha) in [(2.0, 3.0), (2.0, 5.0), (3.0, 4.0)] {
            let c = hardy_constant(p, alpha).unwrap();
            let u = hardy_near_extremal(p, alpha, 0.05, 1.0).unwrap();
            assert_eq!(u.value(1.0), 0.0);
            let r = hardy_ratio(&u, p, alpha, 1e-10).unwrap();
            assert!(r <= c * (1.0 + 1e-8) && r >= 0.95 * c, "p={p} α={alpha}: {r} vs {c}");
        }
        assert!(hardy_near_extremal(2.0, 0.5, 0.1, 1.0).is_err());
    }

    #[test]
    fn sharpness_witness_escapes_lq() {
        let sp = SpaceParams::new(1, 1.0, 1.0, vec![1.0, 2.0], 1.0).unwrap();
        let u = RadialFunction::power(1.0, 1.0, -1.0, 1).unwrap();
        let (l3, x3) = truncated_norms(&u, &sp, 2.0, 1e-3).unwrap();
        let (l6, x6) = truncated_norms(&u, &sp, 2.0, 1e-6).unwrap();
        assert!((l3 - (1e3f64).ln().sqrt()).abs() < 1e-8);
        assert!(l6 > l3);
        assert!((x3 - 2.0 * (1.0 - 1e-3)).abs() < 1e-8 && (x6 - 2.0).abs() < 1e-5);
    }

    #[test]
    fn pointwise_ratio_is_resolution_stable() {
        // log(1/r) has infinite gradient energy for α_1 = 1; use the truncated log instead.
        let sp = SpaceParams::new(1, 2.0, 1.0, vec![0.0, 1.0], 0.0).unwrap();
        let u = crate::moser::MoserSequence::new(1, 1.0, 8.0, 0.1, 1).unwrap().radial_function(1).unwrap();
        let a = pointwise_bound_ratio(&u, &sp, &build_grid(1.0, 2000, 0.99).unwrap()).unwrap();
        let b = pointwise_bound_ratio(&u, &sp, &build_grid(1.0, 4000, 0.99).unwrap()).unwrap();
        assert!(a.is_finite() && (a - b).abs() <= 0.05 * a.max(1e-300), "{a} vs {b}");
    }

    proptest! {
        #[test]
        fn exactly_one_regime(k in 1usize..4, p in 1.0..5.0f64, top in -0.99..12.0f64) {
            let mut alpha = vec![0.0; k + 1];
            alpha[k] = top;
            let sp = SpaceParams::new(k, p, 1.0, alpha, 0.0).unwrap();
            let s = sp.sigma();
            let r = sp.regime();
            prop_assert_eq!(r == Regime::Sobolev, s > 1e-12);
            prop_assert_eq!(r == Regime::Morrey, s < -1e-12);
        }

        #[test]
        fn norm_is_homogeneous(c in -4.0..4.0f64, a in 0.0..2.0f64) {
            let sp = SpaceParams::new(1, 2.0, 1.0, vec![0.0, 1.0], 0.0).unwrap();
            let u = RadialFunction::polynomial(1.0, &[1.0, a, -0.5], 1).unwrap();
            let n = sobolev_norm(&u, &sp).unwrap();
            let nc = sobolev_norm(&u.scaled(c), &sp).unwrap();
            prop_assert!((nc - c.abs() * n).abs() <= 1e-10 * (1.0 + n));
        }

        #[test]
        fn hardy_ratio_below_constant(p in 1.2..4.0f64, extra in 0.2..4.0f64, c in 0.2..3.0f64) {
            let alpha = p - 1.0 + extra;
            let u = RadialFunction::power(1.0, -1.0, c, 1).unwrap().shifted(1.0);
            let ratio = hardy_ratio(&u, p, alpha, 1e-10).unwrap();
            prop_assert!(ratio <= hardy_constant(p, alpha).unwrap() * (1.0 + 1e-8));
        }
    }
}
