use crate::error::{invalid, Error, Result};
use crate::operators::GridGreen;
use crate::quadrature::{dual_cell_weights, Grid};

#[derive(Debug, Clone, PartialEq)]
pub struct MDeltaConfig {
    pub n: usize,
    /// Truncation of `(0, R]` to `[r_min·R, R]`.
    pub r_min: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for MDeltaConfig {
    fn default() -> Self {
        MDeltaConfig { n: 2000, r_min: 1e-6, tol: 1e-12, max_iters: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MDeltaEstimate {
    pub value: f64,
    pub r_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Quadratic forms of `‖G_3 w‖²_{X^{2,2}(−1,1,3)}` and `‖w‖²_{L²_3}` on a truncated span.
struct Forms {
    green: GridGreen,
    inv3: Vec<f64>,
    inv4: Vec<f64>,
    q_m1: Vec<f64>,
    q1: Vec<f64>,
    q3: Vec<f64>,
}

impl Forms {
    fn new(radius: f64, cfg: &MDeltaConfig) -> Result<Self> {
        let grid = Grid::geometric_span(radius, cfg.r_min * radius, cfg.n)?;
        Ok(Forms {
            inv3: grid.nodes().iter().map(|r| r.powi(-3)).collect(),
            inv4: grid.nodes().iter().map(|r| r.powi(-4)).collect(),
            q_m1: dual_cell_weights(&grid, -1.0),
            q1: dual_cell_weights(&grid, 1.0),
            q3: dual_cell_weights(&grid, 3.0),
            green: GridGreen::new(&grid, 3.0)?,
        })
    }

    /// `(u, u', u'')` of `u = G_3 w`.
    fn derivatives(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let out = self.green.apply(w);
        let d2 = (0..w.len()).map(|i| 3.0 * self.inv4[i] * out.moment[i] - w[i]).collect();
        (out.u, out.du, d2)
    }

    /// `K w` with `wᵀ K w = ‖G_3 w‖²_X`.
    fn apply(&self, w: &[f64]) -> Vec<f64> {
        let (u, d1, d2) = self.derivatives(w);
        let y0: Vec<f64> = u.iter().zip(&self.q_m1).map(|(a, q)| a * q).collect();
        let mut k = self.green.apply_transpose(&y0);
        // u' = −r^{−3} C w, u'' = 3 r^{−4} C w − w
        let ym: Vec<f64> = (0..w.len())
            .map(|i| -self.inv3[i] * self.q1[i] * d1[i] + 3.0 * self.inv4[i] * self.q3[i] * d2[i])
            .collect();
        let c = self.green.moment_transpose(&ym);
        for i in 0..w.len() {
            k[i] += c[i] - self.q3[i] * d2[i];
        }
        k
    }

    fn x_norm2(&self, w: &[f64]) -> f64 {
        let (u, d1, d2) = self.derivatives(w);
        (0..w.len()).map(|i| self.q_m1[i] * u[i] * u[i] + self.q1[i] * d1[i] * d1[i] + self.q3[i] * d2[i] * d2[i]).sum()
    }

    fn delta_norm2(&self, w: &[f64]) -> f64 {
        w.iter().zip(&self.q3).map(|(a, q)| q * a * a).sum()
    }
}

/// `‖u‖_{Δ_3} / ‖u‖_{X^{2,2}_R(−1,1,3)}` for `u = G_3 w`, on the same truncated grid as [`estimate_m_delta`].
pub fn m_delta_ratio(radius: f64, cfg: &MDeltaConfig, w: impl Fn(f64) -> f64) -> Result<f64> {
    let forms = Forms::new(radius, cfg)?;
    let wv: Vec<f64> = forms.green.grid().nodes().iter().map(|&r| w(r)).collect();
    Ok((forms.delta_norm2(&wv) / forms.x_norm2(&wv)).sqrt())
}

/// `m_Δ = inf ‖u‖_{Δ_3}/‖u‖_{X^{2,2}_R(−1,1,3)}` over `u = G_3 w`.
///
/// The weight `r^{−1}` on `u` is not integrable at the origin, so the ratio is
/// taken on `[r_min·R, R]` and the estimate depends on `r_min`. The largest
/// generalized eigenvalue of `K w = κ Q_3 w` is found by power iteration and
/// `m_Δ = κ^{−1/2}`.
pub fn estimate_m_delta(radius: f64, cfg: &MDeltaConfig) -> Result<MDeltaEstimate> {
    if !(radius > 0.0) || !(cfg.r_min > 0.0 && cfg.r_min < 1.0) {
        return invalid("need R > 0 and 0 < r_min < 1");
    }
    let forms = Forms::new(radius, cfg)?;
    let nodes = forms.green.grid().nodes().to_vec();
    let mut w: Vec<f64> = nodes.iter().map(|r| 1.0 - r / radius + 0.1).collect();
    let mut kappa = 0.0;
    for it in 1..=cfg.max_iters {
        let kw = forms.apply(&w);
        let mut next: Vec<f64> = kw.iter().zip(&forms.q3).map(|(a, q)| a / q).collect();
        let s = forms.delta_norm2(&next).sqrt();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Iteration("power iteration degenerated".into()));
        }
        next.iter_mut().for_each(|x| *x /= s);
        let k_new = forms.x_norm2(&next) / forms.delta_norm2(&next);
        let done = (k_new - kappa).abs() <= cfg.tol * k_new;
        kappa = k_new;
        w = next;
        if done {
            return Ok(MDeltaEstimate { value: kappa.powf(-0.5), r_min: cfg.r_min, iterations: it, converged: true });
        }
    }
    Ok(MDeltaEstimate { value: kappa.powf(-0.5), r_min: cfg.r_min, iterations: cfg.max_iters, converged: false })
}
