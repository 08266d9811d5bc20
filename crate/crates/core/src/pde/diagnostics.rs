use super::problem::Problem;
use super::solve::Solution;
use crate::error::{invalid, Result};
use crate::functions::RadialFunction;
use crate::operators::{delta_gamma, grid_delta_gamma, GridGreen};
use crate::quadrature::{dual_cell_weights, NodalRule};

/// Nodes excluded at each end of the grid in [`residual`].
const EDGE: usize = 2;

/// Number of test functions in [`weak_form_defects`].
pub const TEST_FUNCTIONS: usize = 10;

/// Relative weighted `L²_α` norm of `Δ_α² u − λ r^{θ−α} q(r, u)`.
///
/// `Δ_α² u` is the 7-point finite-difference `Δ_α` of the chain value of
/// `Δ_α u`; the two smallest and two largest nodes are excluded.
pub fn residual(sol: &Solution, lambda: f64, problem: &dyn Problem) -> Result<f64> {
    let (a, t) = (problem.alpha(), problem.theta());
    let bil = grid_delta_gamma(&sol.laplacian, a)?;
    let grid = sol.grid();
    let weights = dual_cell_weights(grid, a);
    let n = grid.len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in EDGE..n - EDGE {
        let r = grid.nodes()[i];
        let rhs = lambda * r.powf(t - a) * problem.source(r, sol.u.values()[i])?;
        let d = bil.values()[i] - rhs;
        num += weights[i] * d * d;
        den += weights[i] * rhs * rhs;
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
}

/// Boundary values and origin limits of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointDiagnostics {
    pub u_boundary: f64,
    pub laplacian_boundary: f64,
    pub laplacian_origin: f64,
    pub du_origin: f64,
    pub dlaplacian_origin: f64,
    /// `u''(0) + Δ_α u(0)/(α+1)`.
    pub origin_defect: f64,
    /// Extrapolated `u'''(0⁺)`.
    pub d3u_origin: f64,
    /// `(r, u'''(r))` at the nodes nearest `100·floor·R`, `10·floor·R`, `floor·R`.
    pub d3u_samples: Vec<(f64, f64)>,
    /// Extrapolation nodes missing or values non-finite.
    pub unstable: bool,
}

/// Value at 0 of the quadratic through `(x_k, y_k)`.
fn extrapolate(x: [f64; 3], y: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let mut l = 1.0;
        for m in 0..3 {
            if m != k {
                l *= (0.0 - x[m]) / (x[k] - x[m]);
            }
        }
        s += l * y[k];
    }
    s
}

/// Origin limits from the integral identities `u' = −r^{−α} ∫_0^r Δu s^α`,
/// `u'' = α r^{−α−1} ∫_0^r Δu s^α − Δu`, `(Δu)' = −r^{−α} ∫_0^r Δ²u s^α`,
/// extrapolated from the nodes nearest `floor·R·{1, 2, 4}`: even quantities in
/// `r²`, odd ones in `r`.
pub fn endpoint_diagnostics(sol: &Solution, lambda: f64, problem: &dyn Problem, floor: f64) -> Result<EndpointDiagnostics> {
    if !(floor > 0.0 && floor < 0.01) {
        return invalid(format!("floor must lie in (0, 0.01), got {floor}"));
    }
    let (a, t) = (problem.alpha(), problem.theta());
    let grid = sol.grid();
    let r = grid.nodes();
    let w = sol.laplacian.values();
    let green = GridGreen::new(grid, a)?;
    let h: Vec<f64> = r
        .iter()
        .zip(sol.u.values())
        .map(|(&x, &v)| Ok(lambda * x.powf(t - a) * problem.source(x, v)?))
        .collect::<Result<_>>()?;
    let ma = green.moment(w);
    let mb = green.moment(&h);
    let du = |i: usize| -r[i].powf(-a) * ma[i];
    let d2u = |i: usize| a * r[i].powf(-a - 1.0) * ma[i] - w[i];
    let dw = |i: usize| -r[i].powf(-a) * mb[i];
    let d3u = |i: usize| -a * (a + 1.0) * r[i].powf(-a - 2.0) * ma[i] + a * w[i] / r[i] - dw(i);
    let radius = grid.radius();
    let idx = [1.0, 2.0, 4.0].map(|s| grid.nearest(s * floor * radius));
    let xr = idx.map(|i| r[i]);
    let xs = xr.map(|x| x * x);
    let even = |f: &dyn Fn(usize) -> f64| extrapolate(xs, idx.map(f));
    let odd = |f: &dyn Fn(usize) -> f64| extrapolate(xr, idx.map(f));
    let laplacian_origin = even(&|i| w[i]);
    let d2u0 = even(&d2u);
    let d3u_samples: Vec<(f64, f64)> =
        [100.0, 10.0, 1.0].iter().map(|s| grid.nearest(s * floor * radius)).map(|i| (r[i], d3u(i))).collect();
    let out = EndpointDiagnostics {
        u_boundary: *sol.u.values().last().unwrap(),
        laplacian_boundary: *w.last().unwrap(),
        laplacian_origin,
        du_origin: odd(&du),
        dlaplacian_origin: odd(&dw),
        origin_defect: d2u0 + laplacian_origin / (a + 1.0),
        d3u_origin: odd(&d3u),
        d3u_samples,
        unstable: false,
    };
    let distinct = idx[0] < idx[1] && idx[1] < idx[2];
    let finite = [out.laplacian_origin, out.du_origin, out.dlaplacian_origin, out.origin_defect, out.d3u_origin]
        .iter()
        .all(|v| v.is_finite());
    Ok(EndpointDiagnostics { unstable: !(distinct && finite), ..out })
}

/// `|∫ Δ_α u Δ_α v r^α − λ ∫ q(r,u) v r^θ| / ‖v‖_{Δ_α}` for
/// `v_j = (1 − (r/R)²)(r/R)^{2j}`, `j < 10`.
pub fn weak_form_defects(sol: &Solution, lambda: f64, problem: &dyn Problem) -> Result<Vec<f64>> {
    let (a, t) = (problem.alpha(), problem.theta());
    let grid = sol.grid();
    let radius = grid.radius();
    let qa = NodalRule::new(grid, a)?;
    let qt = NodalRule::new(grid, t)?;
    let q: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(sol.u.values())
        .map(|(&r, &v)| problem.source(r, v))
        .collect::<Result<_>>()?;
    (0..TEST_FUNCTIONS)
        .map(|j| {
            let mut c = vec![0.0; 2 * j + 3];
            c[2 * j] = radius.powi(-2 * j as i32);
            c[2 * j + 2] = -radius.powi(-2 * j as i32 - 2);
            let v = RadialFunction::polynomial(radius, &c, 2)?;
            let lv = delta_gamma(&v, a)?;
            let lvn: Vec<f64> = grid.nodes().iter().map(|&r| lv.value(r)).collect();
            let vn: Vec<f64> = grid.nodes().iter().map(|&r| v.value(r)).collect();
            let lhs = qa.integrate(&lvn.iter().zip(sol.laplacian.values()).map(|(x, y)| x * y).collect::<Vec<_>>());
            let rhs = lambda * qt.integrate(&vn.iter().zip(&q).map(|(x, y)| x * y).collect::<Vec<_>>());
            let norm = qa.integrate(&lvn.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
            Ok((lhs - rhs).abs() / norm)
        })
        .collect()
}

