//! Radial functions: analytic closures and sampled grid values.

use crate::error::{invalid, Error, Result};
use crate::quadrature::Grid;
use std::sync::Arc;

/// Scalar evaluator shared between radial functions.
pub type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function on `(0, R]` with closures for `u, u', ..., u^(k)`.
#[derive(Clone)]
pub struct RadialFunction {
    radius: f64,
    derivs: Vec<Eval>,
}

impl std::fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialFunction").field("radius", &self.radius).field("order", &self.order()).finish()
    }
}

impl RadialFunction {
    pub fn new(radius: f64, derivs: Vec<Eval>) -> Result<Self> {
        if !(radius > 0.0) {
            return invalid(format!("radius must be positive, got {radius}"));
        }
        if derivs.is_empty() {
            return invalid("a radial function needs at least its value");
        }
        Ok(RadialFunction { radius, derivs })
    }

    /// Number of available derivatives.
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.derivs[0])(r)
    }

    /// `u^(j)(r)`.
    pub fn eval(&self, j: usize, r: f64) -> Result<f64> {
        match self.derivs.get(j) {
            Some(f) => Ok(f(r)),
            None => Err(Error::InvalidParameter(format!(
                "derivative of order {j} requested, only {} available",
                self.order()
            ))),
        }
    }

    pub fn derivative_fn(&self, j: usize) -> Result<Eval> {
        self.derivs.get(j).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!("derivative of order {j} requested, only {} available", self.order()))
        })
    }

    pub fn derivs(&self) -> &[Eval] {
        &self.derivs
    }

    /// Keeps derivatives up to order `k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return invalid(format!("cannot extend order {} to {k}", self.order()));
        }
        Ok(RadialFunction { radius: self.radius, derivs: self.derivs[..=k].to_vec() })
    }

    pub fn scaled(&self, c: f64) -> Self {
        let derivs = self
            .derivs
            .iter()
            .map(|f| {
                let f = f.clone();
                Arc::new(move |r: f64| c * f(r)) as Eval
            })
            .collect();
        RadialFunction { radius: self.radius, derivs }
    }

    /// `u + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut derivs = self.derivs.clone();
        let f0 = derivs[0].clone();
        derivs[0] = Arc::new(move |r| f0(r) + c);
        RadialFunction { radius: self.radius, derivs }
    }

    /// `Σ c_i r^i` with all derivatives up to `order`.
    pub fn polynomial(radius: f64, coeffs: &[f64], order: usize) -> Result<Self> {
        let mut derivs = Vec::with_capacity(order + 1);
        let mut c = coeffs.to_vec();
        for _ in 0..=order {
            let cc = c.clone();
            derivs.push(Arc::new(move |r: f64| cc.iter().rev().fold(0.0, |acc, &a| acc * r + a)) as Eval);
            c = c.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect();
        }
        RadialFunction::new(radius, derivs)
    }

    /// `c r^e` with all derivatives up to `order`.
    pub fn power(radius: f64, c: f64, e: f64, order: usize) -> Result<Self> {
        let mut derivs = Vec::with_capacity(order + 1);
        let mut coef = c;
        for j in 0..=order {
            let (k, ej) = (coef, e - j as f64);
            derivs.push(Arc::new(move |r: f64| if k == 0.0 { 0.0 } else { k * r.powf(ej) }) as Eval);
            coef *= e - j as f64;
        }
        RadialFunction::new(radius, derivs)
    }
}

/// Values of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return invalid(format!("{} values for {} nodes", values.len(), grid.len()));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Finite-difference derivative of order `j <= 4` with the default stencil:
    /// three nodes for `j <= 2`, five for `j = 3, 4`. Stencils are one-sided
    /// near the ends.
    pub fn derivative(&self, j: usize) -> Result<GridFunction> {
        if j > 4 {
            return invalid(format!("grid derivatives are limited to order 4, got {j}"));
        }
        let width = if j <= 2 { 3 } else { 5 };
        self.derivative_with_width(j, width)
    }

    /// Finite-difference derivative with an explicit stencil width `>= j + 1`.
    pub fn derivative_with_width(&self, j: usize, width: usize) -> Result<GridFunction> {
        let r = self.grid.nodes();
        let n = r.len();
        if width < j + 1 || width > n {
            return invalid(format!("stencil width {width} unusable for order {j} on {n} nodes"));
        }
        let mut out = Vec::with_capacity(n);
        let half = width / 2;
        for i in 0..n {
            let start = i.saturating_sub(half).min(n - width);
            let xs = &r[start..start + width];
            let w = fornberg(r[i], xs, j);
            out.push(w.iter().zip(&self.values[start..start + width]).map(|(a, b)| a * b).sum());
        }
        GridFunction::new(self.grid.clone(), out)
    }
}

/// Samples `u` at the grid nodes.
pub fn from_analytic(u: &RadialFunction, grid: &Grid) -> GridFunction {
    let values = grid.nodes().iter().map(|&r| u.value(r)).collect();
    GridFunction { grid: grid.clone(), values }
}

/// Finite-difference weights for the `m`-th derivative at `z` on nodes `xs`.
pub fn fornberg(z: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(m)
}
