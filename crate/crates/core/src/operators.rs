//! Weighted Laplacians `Δ_γ u = −u'' − γu'/r`, their Green inverse with
//! Navier data at `R`, and the constants of iterated Laplacians.

use crate::error::{invalid, Error, Result};
use crate::functions::{Eval, GridFunction, RadialFunction};
use crate::quadrature::{cumulative_integral, legendre16, CumulativeIntegral, Grid, Integrand, NodalRule};
use crate::special::{factorial, gamma_ratio};
use std::sync::Arc;

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `Δ_γ u` with derivatives up to order `u.order() − 2`.
pub fn delta_gamma(u: &RadialFunction, gamma: f64) -> Result<RadialFunction> {
    if u.order() < 2 {
        return invalid(format!("Δ_γ needs two derivatives, got {}", u.order()));
    }
    let d: Vec<Eval> = u.derivs().to_vec();
    let out_order = u.order() - 2;
    let mut derivs = Vec::with_capacity(out_order + 1);
    for j in 0..=out_order {
        let d = d.clone();
        derivs.push(Arc::new(move |r: f64| {
            // (u'/r)^(j) = Σ_i C(j,i) u^(i+1) (1/r)^(j−i), (1/r)^(m) = (−1)^m m! r^{−m−1}
            let mut s = 0.0;
            for i in 0..=j {
                let m = j - i;
                let inv = if m % 2 == 0 { 1.0 } else { -1.0 } * factorial(m) * r.powi(-(m as i32) - 1);
                s += binomial(j, i) * d[i + 1](r) * inv;
            }
            -d[j + 2](r) - gamma * s
        }) as Eval);
    }
    RadialFunction::new(u.radius(), derivs)
}

/// `∇^k_γ u`: `Δ_γ` applied `⌊k/2⌋` times, followed by one derivative when `k` is odd.
pub fn nabla_gamma_k(u: &RadialFunction, gamma: f64, k: usize) -> Result<RadialFunction> {
    if u.order() < k {
        return invalid(format!("∇^{k} needs {k} derivatives, got {}", u.order()));
    }
    let mut v = u.clone();
    for _ in 0..k / 2 {
        v = delta_gamma(&v, gamma)?;
    }
    if k % 2 == 1 {
        let derivs = v.derivs()[1..].to_vec();
        v = RadialFunction::new(u.radius(), derivs)?;
    }
    Ok(v)
}

/// `Δ_γ` of grid data with 7-point Fornberg stencils.
pub fn grid_delta_gamma(u: &GridFunction, gamma: f64) -> Result<GridFunction> {
    let d1 = u.derivative_with_width(1, 7)?;
    let d2 = u.derivative_with_width(2, 7)?;
    let values = u
        .grid()
        .nodes()
        .iter()
        .zip(d1.values().iter().zip(d2.values()))
        .map(|(r, (a, b))| -b - gamma * a / r)
        .collect();
    GridFunction::new(u.grid().clone(), values)
}

struct GreenData {
    w: CumulativeIntegral,
    edges: Vec<f64>,
    suffix: Vec<f64>,
    radius: f64,
}

impl GreenData {
    fn moment(&self, t: f64) -> f64 {
        self.w.eval_unchecked(t)
    }

    fn outer(&self, a: f64, b: f64) -> f64 {
        let g = self.w.gamma();
        legendre16().integrate(a, b, |t| t.powf(-g) * self.moment(t))
    }

    fn value(&self, r: f64) -> f64 {
        let r = r.min(self.radius);
        let j = self.edges.partition_point(|&e| e <= r);
        if j >= self.edges.len() {
            return 0.0;
        }
        self.suffix[j] + self.outer(r, self.edges[j])
    }
}

/// Green inverse of `Δ_γ` with `u(R) = 0` and `r^γ u' → 0`:
/// `u(r) = ∫_r^R t^{−γ} ∫_0^t v s^γ ds dt`.
///
/// The result carries `u`, `u' = −r^{−γ} W(r)` and `u'' = γ r^{−γ−1} W(r) − v(r)`
/// with `W(r) = ∫_0^r v s^γ ds`.
pub fn green_inverse(v: Integrand, gamma: f64, radius: f64) -> Result<RadialFunction> {
    let w = cumulative_integral(v.clone(), gamma, radius)?;
    let edges = w.edges().to_vec();
    let mut data = GreenData { w, edges: edges.clone(), suffix: vec![0.0; edges.len()], radius };
    let last = edges.len() - 1;
    for j in (0..last).rev() {
        data.suffix[j] = data.suffix[j + 1] + data.outer(edges[j], edges[j + 1]);
    }
    let data = Arc::new(data);
    let (d0, d1, d2) = (data.clone(), data.clone(), data);
    let vv = v;
    RadialFunction::new(
        radius,
        vec![
            Arc::new(move |r| d0.value(r)),
            Arc::new(move |r: f64| -r.powf(-gamma) * d1.moment(r)),
            Arc::new(move |r: f64| gamma * r.powf(-gamma - 1.0) * d2.moment(r) - vv(r)),
        ],
    )
}

/// Smallest node of the roundtrip grid relative to `R`.
pub const ROUNDTRIP_FLOOR: f64 = 1e-4;

/// Relative weighted `L²_γ` error of `Δ_γ(G_γ v)` against `v`, and `|G_γ v(R)|`.
///
/// `G_γ v` is sampled on `n` geometric nodes of `[R·1e−4, R]` and differentiated
/// with 7-point stencils.
pub fn green_roundtrip_error(v: Integrand, gamma: f64, radius: f64, n: usize) -> Result<(f64, f64)> {
    let grid = Grid::geometric_span(radius, ROUNDTRIP_FLOOR * radius, n)?;
    let u = green_inverse(v.clone(), gamma, radius)?;
    let lap = grid_delta_gamma(&crate::functions::from_analytic(&u, &grid), gamma)?;
    let rule = NodalRule::new(&grid, gamma)?;
    let vv: Vec<f64> = grid.nodes().iter().map(|&s| v(s)).collect();
    let err: Vec<f64> = lap.values().iter().zip(&vv).map(|(a, b)| (a - b).powi(2)).collect();
    let den: Vec<f64> = vv.iter().map(|b| b * b).collect();
    let den = rule.integrate(&den);
    if !(den > 0.0) {
        return invalid("roundtrip source vanishes on the grid");
    }
    Ok(((rule.integrate(&err) / den).sqrt(), u.value(radius).abs()))
}

/// Nodal values of the Green inverse.
#[derive(Debug, Clone)]
pub struct GreenOutput {
    /// `u = G_γ v`.
    pub u: Vec<f64>,
    /// `W = ∫_0^r v s^γ ds`.
    pub moment: Vec<f64>,
    /// `u' = −r^{−γ} W`.
    pub du: Vec<f64>,
}

/// Green inverse of `Δ_γ` acting on nodal values.
#[derive(Debug, Clone)]
pub struct GridGreen {
    grid: Grid,
    gamma: f64,
    inner: NodalRule,
    outer: NodalRule,
    inv_pow: Vec<f64>,
}

impl GridGreen {
    pub fn new(grid: &Grid, gamma: f64) -> Result<Self> {
        if !(gamma > -1.0) {
            return invalid(format!("γ must exceed -1, got {gamma}"));
        }
        Ok(GridGreen {
            grid: grid.clone(),
            gamma,
            inner: NodalRule::new(grid, gamma)?,
            outer: NodalRule::new(grid, 0.0)?,
            inv_pow: grid.nodes().iter().map(|r| r.powf(-gamma)).collect(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `G_γ v` at the nodes.
    pub fn apply(&self, v: &[f64]) -> GreenOutput {
        self.from_moment(self.inner.from_origin(v))
    }

    /// Completes `G_γ` from a precomputed moment `W = ∫_0^r v s^γ ds`.
    pub fn from_moment(&self, moment: Vec<f64>) -> GreenOutput {
        let y: Vec<f64> = moment.iter().zip(&self.inv_pow).map(|(w, p)| w * p).collect();
        let u = self.outer.to_boundary(&y);
        let du = y.into_iter().map(|x| -x).collect();
        GreenOutput { u, moment, du }
    }

    /// `W = ∫_0^r v s^γ ds` at the nodes.
    pub fn moment(&self, v: &[f64]) -> Vec<f64> {
        self.inner.from_origin(v)
    }

    /// Adjoint of [`GridGreen::moment`] in the Euclidean pairing.
    pub fn moment_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.inner.from_origin_transpose(y)
    }

    /// Adjoint of `v ↦ G_γ v` in the Euclidean pairing.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let z = self.outer.to_boundary_transpose(y);
        let z: Vec<f64> = z.iter().zip(&self.inv_pow).map(|(a, p)| a * p).collect();
        self.inner.from_origin_transpose(&z)
    }
}

/// Coefficients of `Δ_γ^n ψ = r^{−2n} Σ_i c_{i,n} (log m)^{−i} H^(i)(log(R/r)/log m)`.
///
/// `table[n][i]` for `n = 0..=n_max`, `i = 0..=2n`, seeded with `c_{0,0} = 1`.
pub fn coefficient_table(gamma: f64, n_max: usize) -> Vec<Vec<f64>> {
    let mut table = vec![vec![1.0]];
    for n in 0..n_max {
        let prev = &table[n];
        let nf = n as f64;
        let get = |i: isize| if i < 0 || i as usize >= prev.len() { 0.0 } else { prev[i as usize] };
        let next: Vec<f64> = (0..=2 * (n + 1))
            .map(|i| {
                let i = i as isize;
                (2.0 * nf * gamma - 2.0 * nf * (2.0 * nf + 1.0)) * get(i) + (gamma - 4.0 * nf - 1.0) * get(i - 1)
                    - get(i - 2)
            })
            .collect();
        table.push(next);
    }
    table
}

/// Closed form `c_{1,n} = 2^{2n−1} Γ(n) Γ((γ+1)/2) / Γ((γ+1−2n)/2)`.
pub fn c1n_closed_form(gamma: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let nf = n as f64;
    Ok(2f64.powf(2.0 * nf - 1.0) * gamma_ratio(&[nf, 0.5 * (gamma + 1.0)], &[0.5 * (gamma + 1.0 - 2.0 * nf)])?)
}

/// Sharp exponential constant for the Navier space of order `k` with weight `γ`.
pub fn mu0_navier(theta: f64, k: usize, gamma: f64, p: f64) -> Result<f64> {
    if k == 0 {
        return invalid("order k must be at least 1");
    }
    if !(p > 1.0) {
        return invalid(format!("p must exceed 1, got {p}"));
    }
    if !(theta > -1.0) {
        return invalid(format!("theta must exceed -1, got {theta}"));
    }
    let kf = k as f64;
    let base = if k % 2 == 0 {
        if !(gamma > kf - 1.0) {
            return invalid(format!("even order {k} needs γ > {}, got {gamma}", kf - 1.0));
        }
        gamma_ratio(&[0.5 * kf, 0.5 * (gamma + 1.0)], &[0.5 * (gamma + 1.0 - kf)])
    } else {
        if !(gamma > kf - 2.0) {
            return invalid(format!("odd order {k} needs γ > {}, got {gamma}", kf - 2.0));
        }
        gamma_ratio(&[0.5 * (kf + 1.0), 0.5 * (gamma + 1.0)], &[0.5 * (gamma + 2.0 - kf)])
    };
    let c = 2f64.powf(kf - 1.0) * base?;
    let pc = p / (p - 1.0);
    Ok((theta + 1.0) * c.powf(pc))
}

/// Constants of the comparison inequalities between iterated Laplacians.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConstants {
    /// `C_{γ,q} = q²/((q−1)(γ+1)(γ−2q+1))`.
    pub c_gamma_q: f64,
    /// `C_i` for `i = 1..j−1`.
    pub c_i: Vec<f64>,
}

impl ComparisonConstants {
    /// `Π C_i`, one for an empty list.
    pub fn product(&self) -> f64 {
        self.c_i.iter().product()
    }
}

/// `C_i = p²/([(γ+1)p − (α−2(i−1)p+1)](α−2ip+1))` and `C_{γ,q}`.
pub fn comparison_constants(gamma: f64, q: f64, j: usize, alpha: f64, p: f64) -> Result<ComparisonConstants> {
    if !(q > 1.0) || !(gamma - 2.0 * q + 1.0 > 0.0) {
        return invalid(format!("C_(γ,q) needs q > 1 and γ − 2q + 1 > 0, got γ = {gamma}, q = {q}"));
    }
    let c_gamma_q = q * q / ((q - 1.0) * (gamma + 1.0) * (gamma - 2.0 * q + 1.0));
    let mut c_i = Vec::new();
    for i in 1..j {
        let fi = i as f64;
        let a = (gamma + 1.0) * p - (alpha - 2.0 * (fi - 1.0) * p + 1.0);
        let b = alpha - 2.0 * fi * p + 1.0;
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!("C_{i} is not positive (factors {a}, {b})")));
        }
        c_i.push(p * p / (a * b));
    }
    Ok(ComparisonConstants { c_gamma_q, c_i })
}

/// Both sides of `(γ−1) Π C_i^{−1} = 2^{k−1} Γ(k/2) Γ((γ+1)/2) / Γ((γ+1−k)/2)` for even `k`,
/// with `j = k/2` and `α = kp − 1`.
pub fn gamma_product_identity(k: usize, gamma: f64, p: f64) -> Result<(f64, f64)> {
    if k < 2 || k % 2 != 0 {
        return invalid(format!("the product identity needs an even order k >= 2, got {k}"));
    }
    let kf = k as f64;
    let c = comparison_constants(gamma, 1.5, k / 2, kf * p - 1.0, p)?;
    let lhs = (gamma - 1.0) / c.product();
    let rhs = 2f64.powi(k as i32 - 1) * gamma_ratio(&[kf / 2.0, 0.5 * (gamma + 1.0)], &[0.5 * (gamma + 1.0 - kf)])?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::GridFunction;
    use proptest::prelude::*;

    #[test]
    fn laplacian_of_square() {
        let u = RadialFunction::polynomial(1.0, &[0.0, 0.0, 1.0], 4).unwrap();
        let d = delta_gamma(&u, 3.0).unwrap();
        assert!((d.value(0.4) + 2.0 + 6.0).abs() < 1e-13);
        assert!(d.eval(1, 0.4).unwrap().abs() < 1e-12);
    }

    #[test]
    fn nabla_of_fourth_power() {
        let u = RadialFunction::polynomial(1.0, &[0.0, 0.0, 0.0, 0.0, 1.0], 4).unwrap();
        let gamma = 3.0;
        let v = nabla_gamma_k(&u, gamma, 4).unwrap();
        let want = (12.0 + 4.0 * gamma) * (2.0 + 2.0 * gamma);
        assert_eq!(want, 192.0);
        for r in [0.1, 0.5, 0.9] {
            assert!((v.value(r) - want).abs() < 1e-10);
        }
        let w = nabla_gamma_k(&u, gamma, 3).unwrap();
        // (Δ_γ r^4)' = −(12 + 4γ) 2r
        assert!((w.value(0.5) + (12.0 + 4.0 * gamma)).abs() < 1e-12);
    }

    #[test]
    fn green_examples() {
        for gamma in [0.0, 2.0, 3.5] {
            let r2 = 2.0f64;
            let u = green_inverse(Arc::new(|_| 1.0), gamma, r2).unwrap();
            for r in [1e-6, 0.3, 1.1, 1.9, 2.0] {
                let want = (r2 * r2 - r * r) / (2.0 * (gamma + 1.0));
                assert!((u.value(r) - want).abs() < 1e-13, "γ={gamma} r={r}");
            }
            assert_eq!(u.value(r2), 0.0);
            // r^γ u' → 0
            assert!((1e-8f64).powf(gamma) * u.eval(1, 1e-8).unwrap().abs() < 1e-7);
        }
        let u = green_inverse(Arc::new(|s| s), 2.0, 1.0).unwrap();
        for r in [0.01, 0.5, 0.99] {
            assert!((u.value(r) - (1.0 - r * r * r) / 12.0).abs() < 1e-14);
        }
    }

    #[test]
    fn green_value_matches_its_derivative() {
        let u = green_inverse(Arc::new(|s: f64| (2.0 * s).cos() + s * s), 3.0, 1.0).unwrap();
        let h = 1e-5;
        for r in [0.05, 0.4, 0.8] {
            let fd = (u.value(r + h) - u.value(r - h)) / (2.0 * h);
            assert!((fd - u.eval(1, r).unwrap()).abs() < 1e-8);
            let fd2 = (u.eval(1, r + h).unwrap() - u.eval(1, r - h).unwrap()) / (2.0 * h);
            assert!((fd2 - u.eval(2, r).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn green_roundtrip_on_grid() {
        for gamma in [2.0, 3.0, 5.0] {
            let v: Integrand = Arc::new(|s: f64| 1.0 + s.sin() - 0.3 * s * s);
            let (rel, boundary) = green_roundtrip_error(v, gamma, 1.0, 2000).unwrap();
            assert!(rel <= 1e-6, "γ={gamma}: {rel}");
            assert_eq!(boundary, 0.0);
        }
    }

    #[test]
    fn grid_green_matches_closed_form() {
        let grid = Grid::geometric_span(1.5, 1e-6, 600).unwrap();
        let g = GridGreen::new(&grid, 3.0).unwrap();
        let out = g.apply(&vec![1.0; grid.len()]);
        for (i, &r) in grid.nodes().iter().enumerate() {
            let want = (1.5f64 * 1.5 - r * r) / 8.0;
            assert!((out.u[i] - want).abs() < 1e-12);
            assert!((out.du[i] + r / 4.0).abs() < 1e-12);
        }
        let y: Vec<f64> = grid.nodes().iter().map(|r| r.cos()).collect();
        let v: Vec<f64> = grid.nodes().iter().map(|r| 1.0 + r).collect();
        let lhs: f64 = y.iter().zip(&g.apply(&v).u).map(|(a, b)| a * b).sum();
        let rhs: f64 = g.apply_transpose(&y).iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-11 * lhs.abs());
    }

    #[test]
    fn coefficient_table_first_rows() {
        let gamma = 5.0;
        let t = coefficient_table(gamma, 3);
        assert_eq!(t[1], vec![0.0, gamma - 1.0, -1.0]);
        assert_eq!(t[2][1], 16.0);
        for n in 1..=3 {
            let c = c1n_closed_form(gamma, n).unwrap();
            assert!((t[n][1] - c).abs() <= 1e-12 * c.abs().max(1.0), "n={n}");
            assert_eq!(t[n][2 * n], if n % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn navier_constants() {
        for theta in [0.0, 1.5] {
            assert!((mu0_navier(theta, 1, 2.0, 2.0).unwrap() - (theta + 1.0)).abs() < 1e-12);
        }
        for &gamma in &[1.5, 2.0, 3.0, 4.7, 9.0, 17.0] {
            for &p in &[1.5, 2.0, 3.0] {
                for &theta in &[0.0, 0.5, 2.0] {
                    let got = mu0_navier(theta, 2, gamma, p).unwrap();
                    let want = (theta + 1.0) * (gamma - 1.0f64).powf(p / (p - 1.0));
                    assert!((got - want).abs() <= 1e-12 * want, "γ={gamma} p={p} θ={theta}");
                }
            }
        }
        assert!((mu0_navier(0.0, 3, 3.0, 2.0).unwrap() - 16.0).abs() < 1e-12);
        assert!((mu0_navier(0.0, 2, 3.0, 2.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(mu0_navier(0.0, 2, 1.0, 2.0).is_err());
        assert!(mu0_navier(0.0, 3, 1.0, 2.0).is_err());
        assert!(mu0_navier(0.0, 2, 3.0, 1.0).is_err());
    }

    #[test]
    fn comparison_examples() {
        let c = comparison_constants(7.0, 2.0, 1, 3.0, 2.0).unwrap();
        assert!((c.c_gamma_q - 0.125).abs() < 1e-15);
        assert_eq!(c.product(), 1.0);
        let c = comparison_constants(5.0, 1.5, 2, 7.0, 2.0).unwrap();
        assert!((4.0 / c.product() - 16.0).abs() < 1e-12);
    }

    fn product_identity(k: usize, gamma: f64, p: f64) -> (f64, f64) {
        gamma_product_identity(k, gamma, p).unwrap()
    }

    #[test]
    fn simplified_form_of_c_i() {
        let (gamma, k, p) = (8.5, 6usize, 2.5);
        let j = k / 2;
        let c = comparison_constants(gamma, 1.5, j, k as f64 * p - 1.0, p).unwrap();
        for (idx, ci) in c.c_i.iter().enumerate() {
            let i = (idx + 1) as f64;
            let s = 1.0 / (4.0 * (0.5 * (gamma + 1.0) - j as f64 + i - 1.0) * (j as f64 - i));
            assert!((ci - s).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn comparison_product_identity(k in prop::sample::select(vec![4usize, 6]), extra in 0.5..12.0f64, p in 1.1..4.0f64) {
            let gamma = 2.0 * 1.5 - 1.0 + extra + k as f64;
            let (lhs, rhs) = product_identity(k, gamma, p);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
        }

        #[test]
        fn table_matches_closed_form(gamma in 2.0..20.0f64, n in 1usize..6) {
            prop_assume!(((gamma + 1.0 - 2.0 * n as f64) / 2.0).fract().abs() > 1e-6);
            let t = coefficient_table(gamma, n);
            let c = c1n_closed_form(gamma, n).unwrap();
            prop_assert!((t[n][1] - c).abs() <= 1e-10 * c.abs().max(1.0));
        }

        #[test]
        fn green_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64) {
            let grid = Grid::geometric_span(1.0, 1e-5, 200).unwrap();
            let g = GridGreen::new(&grid, 2.5).unwrap();
            let f: Vec<f64> = grid.nodes().iter().map(|r| r.exp()).collect();
            let h: Vec<f64> = grid.nodes().iter().map(|r| 1.0 / (1.0 + r)).collect();
            let mix: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
            let (uf, uh, um) = (g.apply(&f).u, g.apply(&h).u, g.apply(&mix).u);
            for i in 0..grid.len() {
                prop_assert!((um[i] - a * uf[i] - b * uh[i]).abs() < 1e-12);
            }
            let gm = GridFunction::new(grid.clone(), um).unwrap();
            prop_assert_eq!(gm.values()[grid.len() - 1], 0.0);
        }
    }
}
