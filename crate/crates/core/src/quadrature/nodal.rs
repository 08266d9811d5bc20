use super::gauss::legendre8;
use super::grid::Grid;
use crate::error::{invalid, Result};

const WIDTH: usize = 6;

#[derive(Debug, Clone)]
struct Stencil {
    start: usize,
    w: Vec<f64>,
}

impl Stencil {
    #[inline]
    fn apply(&self, f: &[f64]) -> f64 {
        self.w.iter().zip(&f[self.start..]).map(|(w, x)| w * x).sum()
    }
}

/// Integration of nodal data against `s^beta` on a [`Grid`].
///
/// Each interval uses the local degree-5 interpolant through the six nearest
/// nodes. The piece `[0, r_0]` below the first node is extrapolated from the
/// first nodes and is only present when `beta > -1`.
#[derive(Debug, Clone)]
pub struct NodalRule {
    n: usize,
    beta: f64,
    intervals: Vec<Stencil>,
    cap: Vec<(usize, f64)>,
}

fn lagrange(xs: &[f64], j: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (m, &xm) in xs.iter().enumerate() {
        if m != j {
            v *= (x - xm) / (xs[j] - xm);
        }
    }
    v
}

impl NodalRule {
    pub fn new(grid: &Grid, beta: f64) -> Result<NodalRule> {
        let r = grid.nodes();
        let n = r.len();
        if n < WIDTH {
            return invalid(format!("nodal rule needs at least {WIDTH} nodes"));
        }
        let gl = legendre8();
        let mut intervals = Vec::with_capacity(n - 1);
        for k in 1..n {
            let start = k.saturating_sub(3).min(n - WIDTH);
            let xs = &r[start..start + WIDTH];
            let (a, b) = (r[k - 1], r[k]);
            let w = (0..WIDTH)
                .map(|j| gl.integrate(a, b, |s| lagrange(xs, j, s) * s.powf(beta)))
                .collect();
            intervals.push(Stencil { start, w });
        }
        let cap = if beta > -1.0 {
            let r0 = r[0];
            let h = r[1] - r[0];
            let m0 = r0.powf(beta + 1.0) / (beta + 1.0);
            if h >= 0.25 * r0 {
                let m1 = r0.powf(beta + 2.0) / (beta + 2.0) - r0 * m0;
                vec![(0, m0 - m1 / h), (1, m1 / h)]
            } else {
                vec![(0, m0)]
            }
        } else {
            Vec::new()
        };
        Ok(NodalRule { n, beta, intervals, cap })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn cap_value(&self, f: &[f64]) -> f64 {
        self.cap.iter().map(|&(i, w)| w * f[i]).sum()
    }

    /// `∫ f s^beta` over `(0, R]`, or over `[r_0, R]` when there is no cap.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n);
        self.cap_value(f) + self.intervals.iter().map(|s| s.apply(f)).sum::<f64>()
    }

    /// Per-node weights of [`NodalRule::integrate`].
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        for &(i, c) in &self.cap {
            w[i] += c;
        }
        for s in &self.intervals {
            for (j, c) in s.w.iter().enumerate() {
                w[s.start + j] += c;
            }
        }
        w
    }

    /// `W_i = ∫_0^{r_i} f s^beta`.
    pub fn from_origin(&self, f: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        let mut acc = self.cap_value(f);
        out.push(acc);
        for s in &self.intervals {
            acc += s.apply(f);
            out.push(acc);
        }
        out
    }

    /// `U_i = ∫_{r_i}^R f s^beta`.
    pub fn to_boundary(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        let mut acc = 0.0;
        for k in (1..self.n).rev() {
            acc += self.intervals[k - 1].apply(f);
            out[k - 1] = acc;
        }
        out
    }

    /// Adjoint of [`NodalRule::from_origin`].
    pub fn from_origin_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        let mut suffix = 0.0;
        for k in (1..self.n).rev() {
            suffix += y[k];
            let s = &self.intervals[k - 1];
            for (j, c) in s.w.iter().enumerate() {
                out[s.start + j] += c * suffix;
            }
        }
        suffix += y[0];
        for &(i, c) in &self.cap {
            out[i] += c * suffix;
        }
        out
    }

    /// Adjoint of [`NodalRule::to_boundary`].
    pub fn to_boundary_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        let mut prefix = 0.0;
        for k in 1..self.n {
            prefix += y[k - 1];
            let s = &self.intervals[k - 1];
            for (j, c) in s.w.iter().enumerate() {
                out[s.start + j] += c * prefix;
            }
        }
        out
    }
}

/// Positive dual-cell weights `∫_{cell_i} s^beta ds`, cells split at midpoints.
///
/// The first cell starts at the origin when `beta > -1`, else at `r_0`.
pub fn dual_cell_weights(grid: &Grid, beta: f64) -> Vec<f64> {
    let r = grid.nodes();
    let n = r.len();
    let prim = |s: f64| if beta == -1.0 { s.ln() } else { s.powf(beta + 1.0) / (beta + 1.0) };
    let mut w = Vec::with_capacity(n);
    let mut left = if beta > -1.0 { None } else { Some(r[0]) };
    for i in 0..n {
        let right = if i + 1 < n { 0.5 * (r[i] + r[i + 1]) } else { r[i] };
        let lo = match left {
            None => 0.0,
            Some(x) => prim(x),
        };
        w.push(prim(right) - lo);
        left = Some(right);
    }
    w
}
