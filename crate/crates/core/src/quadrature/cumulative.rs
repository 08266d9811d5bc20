use super::gauss::{legendre16, GaussTable};
use crate::error::{invalid, Error, Result};
use std::sync::Arc;

/// Shared radial integrand.
pub type Integrand = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const RATIO: f64 = 0.7;
const PANELS: usize = 80;

/// `t ↦ ∫_0^t v(s) s^gamma ds` on `(0, R]`.
///
/// Prefix sums are stored at geometric breakpoints, so one evaluation costs a
/// single 16-point Gauss rule.
#[derive(Clone)]
pub struct CumulativeIntegral {
    v: Integrand,
    gamma: f64,
    radius: f64,
    origin: GaussTable,
    edges: Vec<f64>,
    prefix: Vec<f64>,
}

impl std::fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CumulativeIntegral").field("gamma", &self.gamma).field("radius", &self.radius).finish()
    }
}

/// Builds the cumulative weighted integral of `v`.
pub fn cumulative_integral(v: Integrand, gamma: f64, radius: f64) -> Result<CumulativeIntegral> {
    if !(gamma > -1.0) {
        return invalid(format!("weight exponent must exceed -1, got {gamma}"));
    }
    if !(radius > 0.0) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    let origin = GaussTable::jacobi_origin(16, gamma);
    let mut edges: Vec<f64> = (0..=PANELS).rev().map(|j| radius * RATIO.powi(j as i32)).collect();
    edges[PANELS] = radius;
    let mut prefix = Vec::with_capacity(edges.len());
    let first = origin.integrate_origin(edges[0], gamma, |s| v(s));
    prefix.push(first);
    let gl = legendre16();
    for w in edges.windows(2) {
        let seg = gl.integrate(w[0], w[1], |s| v(s) * s.powf(gamma));
        prefix.push(prefix.last().unwrap() + seg);
    }
    Ok(CumulativeIntegral { v, gamma, radius, origin, edges, prefix })
}

impl CumulativeIntegral {
    /// Value at `t`; fails outside `(0, R]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || t > self.radius * (1.0 + 1e-14) {
            return Err(Error::Domain(format!("cumulative integral evaluated at {t} outside (0, {}]", self.radius)));
        }
        Ok(self.eval_unchecked(t.min(self.radius)))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        let v = &self.v;
        if t <= self.edges[0] {
            return self.origin.integrate_origin(t, self.gamma, |s| v(s));
        }
        let j = self.edges.partition_point(|&e| e <= t) - 1;
        let g = self.gamma;
        self.prefix[j] + legendre16().integrate(self.edges[j], t, |s| v(s) * s.powf(g))
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn integrand(&self) -> &Integrand {
        &self.v
    }

    pub(crate) fn edges(&self) -> &[f64] {
        &self.edges
    }
}
