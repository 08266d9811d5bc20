use crate::error::{invalid, Error, Result};
use crate::functions::{Eval, RadialFunction};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Dense polynomial `Σ c_i t^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect::<Vec<_>>();
        Polynomial { coeffs: if coeffs.is_empty() { vec![0.0] } else { coeffs } }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }
}

const SCAN: usize = 1000;
const EXTRA_DEGREES: usize = 4;

/// `1 + k` vanishing derivatives at 0, Hermite data at 1.
struct Conditions {
    k: usize,
    low: usize,
    at_one: Vec<(usize, f64)>,
}

impl Conditions {
    fn new(k: usize) -> Self {
        let mut at_one = vec![(0, 1.0), (1, 1.0)];
        for j in 2..k {
            at_one.push((j, 0.0));
        }
        Conditions { k, low: k + 2, at_one }
    }

    fn min_degree(&self) -> usize {
        self.low + self.at_one.len() - 1
    }
}

fn falling(i: usize, j: usize) -> f64 {
    if j > i {
        0.0
    } else {
        (i - j + 1..=i).map(|x| x as f64).product()
    }
}

/// Solves for the coefficients of `t^low..t^min_degree` given a fixed top coefficient.
fn solve(c: &Conditions, top: Option<(usize, f64)>) -> Result<Polynomial> {
    let deg = c.min_degree();
    let m = c.at_one.len();
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for (row, &(j, val)) in c.at_one.iter().enumerate() {
        for col in 0..m {
            a[(row, col)] = falling(c.low + col, j);
        }
        b[row] = val - top.map_or(0.0, |(d, s)| s * falling(d, j));
    }
    let x = a.lu().solve(&b).ok_or_else(|| Error::Profile("singular Hermite system".into()))?;
    let len = top.map_or(deg, |(d, _)| d.max(deg)) + 1;
    let mut coeffs = vec![0.0; len];
    for col in 0..m {
        coeffs[c.low + col] = x[col];
    }
    if let Some((d, s)) = top {
        coeffs[d] += s;
    }
    Ok(Polynomial { coeffs })
}

fn min_slope(phi: &Polynomial) -> f64 {
    let d = phi.derivative();
    (0..=SCAN).map(|i| d.eval(i as f64 / SCAN as f64)).fold(f64::INFINITY, f64::min)
}

fn max_slope(phi: &Polynomial) -> f64 {
    let d = phi.derivative();
    let coarse = (0..=SCAN).map(|i| i as f64 / SCAN as f64).max_by(|a, b| d.eval(*a).total_cmp(&d.eval(*b))).unwrap();
    // golden-section polish around the best scan point
    let (mut lo, mut hi) = ((coarse - 1.0 / SCAN as f64).max(0.0), (coarse + 1.0 / SCAN as f64).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if d.eval(x1) > d.eval(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    d.eval(0.5 * (lo + hi)).max(d.eval(coarse))
}

/// Lowest-degree polynomial with `φ(0) = … = φ^(k+1)(0) = 0`,
/// `φ(1) = φ'(1) = 1`, `φ''(1) = … = φ^(k−1)(1) = 0` and `φ' >= 0` on `[0, 1]`.
///
/// If the minimal degree violates monotonicity, one extra top coefficient is
/// introduced and tuned to maximise `min φ'`, up to four extra degrees.
pub fn profile_phi(k: usize) -> Result<Polynomial> {
    if k == 0 {
        return invalid("profile order k must be at least 1");
    }
    let c = Conditions::new(k);
    let phi = solve(&c, None)?;
    if min_slope(&phi) >= -1e-12 {
        return Ok(phi);
    }
    for extra in 1..=EXTRA_DEGREES {
        let d = c.min_degree() + extra;
        let score = |s: f64| solve(&c, Some((d, s))).map(|p| min_slope(&p)).unwrap_or(f64::NEG_INFINITY);
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in -200..=200 {
            let s = i as f64 * 0.5;
            let v = score(s);
            if v > best.0 {
                best = (v, s);
            }
        }
        if best.0 >= -1e-12 {
            return solve(&c, Some((d, best.1)));
        }
    }
    Err(Error::Profile(format!(
        "no monotone profile for k = {} within {EXTRA_DEGREES} extra degrees",
        c.k
    )))
}

/// `‖φ'‖_∞` on `[0, 1]`.
pub fn profile_slope_sup(phi: &Polynomial) -> f64 {
    max_slope(phi)
}

/// The piecewise profile `H` built from `φ` with plateau width `ε`.
#[derive(Debug, Clone)]
pub struct Profile {
    eps: f64,
    derivs: Vec<Polynomial>,
    slope_sup: f64,
}

impl Profile {
    /// Profile with `derivs` derivatives available.
    pub fn new(k: usize, eps: f64, derivs: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return invalid(format!("ε must lie in (0, 1/2), got {eps}"));
        }
        let phi = profile_phi(k)?;
        let slope_sup = profile_slope_sup(&phi);
        let mut list = vec![phi];
        for _ in 0..derivs {
            let next = list.last().unwrap().derivative();
            list.push(next);
        }
        Ok(Profile { eps, derivs: list, slope_sup })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn phi(&self) -> &Polynomial {
        &self.derivs[0]
    }

    pub fn slope_sup(&self) -> f64 {
        self.slope_sup
    }

    pub fn max_order(&self) -> usize {
        self.derivs.len() - 1
    }

    /// `H^(j)(t)`.
    pub fn h(&self, j: usize, t: f64) -> f64 {
        let e = self.eps;
        let t = t.max(0.0);
        if t > 1.0 {
            return if j == 0 { 1.0 } else { 0.0 };
        }
        let scale = e.powi(1 - j as i32);
        if t <= e {
            scale * self.derivs[j].eval(t / e)
        } else if t <= 1.0 - e {
            match j {
                0 => t,
                1 => 1.0,
                _ => 0.0,
            }
        } else {
            let s = (1.0 - t) / e;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 {
                1.0 - e * self.derivs[0].eval(s)
            } else {
                -sign * scale * self.derivs[j].eval(s)
            }
        }
    }
}

/// Moser sequence `ψ(r) = H(log(R/r)/log m)`.
#[derive(Debug, Clone)]
pub struct MoserSequence {
    k: usize,
    radius: f64,
    log_m: f64,
    profile: Arc<Profile>,
}

impl MoserSequence {
    /// `k` sets the boundary data of `φ`; `order` derivatives are available.
    pub fn new(k: usize, radius: f64, log_m: f64, eps: f64, order: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return invalid(format!("radius must be positive, got {radius}"));
        }
        if !(log_m > 0.0) {
            return invalid(format!("m must exceed 1, got log m = {log_m}"));
        }
        Ok(MoserSequence { k, radius, log_m, profile: Arc::new(Profile::new(k, eps, order)?) })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `R m^{−t}`.
    pub fn radius_at(&self, t: f64) -> f64 {
        self.radius * (-self.log_m * t).exp()
    }

    pub fn log_m(&self) -> f64 {
        self.log_m
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// `log(R/r)/log m`.
    pub fn t(&self, r: f64) -> f64 {
        (self.radius / r).ln() / self.log_m
    }

    /// `ψ^(i)(r) = r^{−i} Σ_j c(j,i) H^(j)(t) (log m)^{−j}`, with
    /// `c(1,1) = −1` and `c(j,i+1) = −i c(j,i) − c(j−1,i)`.
    pub fn derivative(&self, i: usize, r: f64) -> f64 {
        let t = self.t(r);
        if i == 0 {
            return self.profile.h(0, t);
        }
        let c = chain_coefficients(i);
        let mut s = 0.0;
        let mut lp = 1.0;
        for (j, cj) in c.iter().enumerate().skip(1) {
            lp /= self.log_m;
            if *cj != 0.0 {
                s += cj * self.profile.h(j, t) * lp;
            }
        }
        s * r.powi(-(i as i32))
    }

    pub fn radial_function(&self, order: usize) -> Result<RadialFunction> {
        if order > self.profile.max_order() {
            return invalid(format!("profile carries {} derivatives, {order} requested", self.profile.max_order()));
        }
        let derivs = (0..=order)
            .map(|i| {
                let s = self.clone();
                Arc::new(move |r: f64| s.derivative(i, r)) as Eval
            })
            .collect();
        RadialFunction::new(self.radius, derivs)
    }
}

/// `c(j, i)` for `j = 0..=i`.
pub(crate) fn chain_coefficients(i: usize) -> Vec<f64> {
    let mut c = vec![0.0, -1.0];
    for n in 1..i {
        let mut next = vec![0.0; n + 2];
        for j in 1..=n + 1 {
            let a = if j <= n { c[j] } else { 0.0 };
            let b = c[j - 1];
            next[j] = -(n as f64) * a - b;
        }
        c = next;
    }
    c
}
