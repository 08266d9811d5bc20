use radmoser::functions::GridFunction;
use radmoser::operators::GridGreen;
use radmoser::pde::*;
use radmoser::quadrature::Grid;
use radmoser::Result;

const J_3_2: f64 = 4.493409457909064175307880927276;

fn power(alpha: f64, theta: f64, p: f64, g: Coefficient) -> PowerProblem {
    PowerProblem::new(alpha, theta, p, g, 1.0).unwrap()
}

fn cfg(n: usize) -> SolveConfig {
    SolveConfig { n, ..SolveConfig::default() }
}

#[test]
fn linear_eigenvalue_matches_bessel_zero() {
    let r = solve_power(&power(4.0, 4.0, 2.0, Coefficient::Constant(1.0)), &cfg(2000)).unwrap();
    assert!(r.converged);
    assert!((r.lambda / J_3_2.powi(4) - 1.0).abs() < 1e-9, "{}", r.lambda);
    assert!((r.rayleigh - r.lambda).abs() < 1e-8 * r.lambda);
    assert!(r.residual < 1e-6);
}

#[test]
fn quotient_halves_when_coefficient_doubles() {
    let a = solve_power(&power(4.0, 4.5, 2.0, Coefficient::Affine { a: 1.0, b: 0.5 }), &cfg(1000)).unwrap();
    let b = solve_power(&power(4.0, 4.5, 2.0, Coefficient::Affine { a: 2.0, b: 1.0 }), &cfg(1000)).unwrap();
    assert!((b.rayleigh - a.rayleigh / 2.0).abs() < 1e-10 * a.rayleigh);
}

#[test]
fn trial_quotients_bound_the_minimum() {
    let pr = power(4.0, 4.0, 2.0, Coefficient::Constant(1.0));
    let c = cfg(1000);
    let r = solve_power(&pr, &c).unwrap();
    let trials: Vec<Box<dyn Fn(f64) -> f64>> = vec![
        Box::new(|s: f64| 1.0 - s * s),
        Box::new(|s: f64| 1.0 - s),
        Box::new(|s: f64| (1.0 - s * s).powi(2) + 0.1),
        Box::new(|s: f64| (0.5 * std::f64::consts::PI * s).cos()),
    ];
    for t in trials {
        let q = rayleigh_quotient(&pr, &c, t).unwrap();
        assert!(r.rayleigh <= q * (1.0 + 1e-12), "{} vs {q}", r.rayleigh);
    }
}

#[test]
fn green_trial_upper_bounds_power_quotient() {
    let pr = power(4.0, 4.5, 3.0, Coefficient::Constant(1.0));
    let c = cfg(1000);
    let r = solve_power(&pr, &c).unwrap();
    let grid = Grid::geometric_span(1.0, c.r_min, c.n).unwrap();
    let green = GridGreen::new(&grid, 4.0).unwrap();
    let h: Vec<f64> = grid.nodes().iter().map(|r| r.powf(0.5)).collect();
    let w = green.apply(&h).u;
    let nodes = grid.nodes().to_vec();
    let q = rayleigh_quotient(&pr, &c, |r| w[nodes.iter().position(|x| *x == r).unwrap()]).unwrap();
    assert!(r.rayleigh <= q);
}

#[test]
fn superlinear_solution_prefers_p_minus_two_scaling() {
    let r = solve_power(&power(4.0, 4.0, 3.0, Coefficient::Constant(1.0)), &cfg(1000)).unwrap();
    let s = r.scaling.unwrap();
    assert_eq!(s.preferred, ScalingExponent::PMinus2);
    assert!(s.residual_p_minus_2 < 1e-6 && s.residual_p_minus_1 > 1e-2);
    assert!((r.rayleigh - r.lambda.powf(2.0 / 3.0)).abs() < 1e-6 * r.rayleigh);
}

#[test]
fn endpoint_identities_hold() {
    let r = solve_power(&power(4.0, 4.0, 2.0, Coefficient::Constant(1.0)), &cfg(2000)).unwrap();
    let e = &r.endpoints;
    assert!(!e.unstable);
    assert_eq!(e.u_boundary, 0.0);
    assert_eq!(e.laplacian_boundary, 0.0);
    assert!(e.origin_defect.abs() <= 1e-3 * e.laplacian_origin.abs());
    let d3: Vec<f64> = e.d3u_samples.iter().map(|x| x.1.abs()).collect();
    assert!(d3[0] > d3[1] && d3[1] > d3[2]);
    assert!(r.weak_defects.iter().all(|d| *d <= 1e-5));
}

#[test]
fn negated_start_gives_negated_solution() {
    let pr = power(4.0, 4.0, 3.0, Coefficient::Constant(1.0));
    let a = solve_power(&pr, &cfg(500)).unwrap();
    let b = solve_power_with_sign(&pr, &cfg(500), -1.0).unwrap();
    assert!((a.lambda - b.lambda).abs() <= 1e-12 * a.lambda);
    assert!((a.residual - b.residual).abs() <= 1e-12 + 1e-6 * a.residual);
    for (x, y) in a.solution.u.values().iter().zip(b.solution.u.values()) {
        assert!((x + y).abs() <= 1e-12 * x.abs().max(1e-300));
    }
}

struct Fixed(f64, f64);

impl Problem for Fixed {
    fn alpha(&self) -> f64 {
        self.0
    }
    fn theta(&self) -> f64 {
        self.1
    }
    fn radius(&self) -> f64 {
        1.0
    }
    fn source(&self, r: f64, _t: f64) -> Result<f64> {
        Ok(1.0 + r * r * (2.0 * r).cos())
    }
}

fn chain_solution(pr: &Fixed, n: usize) -> Solution {
    let grid = Grid::geometric_span(1.0, 1e-6, n).unwrap();
    let green = GridGreen::new(&grid, pr.0).unwrap();
    let h: Vec<f64> = grid.nodes().iter().map(|&r| r.powf(pr.1 - pr.0) * pr.source(r, 0.0).unwrap()).collect();
    let w = green.apply(&h).u;
    let u = green.apply(&w).u;
    Solution { u: GridFunction::new(grid.clone(), u).unwrap(), laplacian: GridFunction::new(grid, w).unwrap() }
}

#[test]
fn residual_of_green_chain_is_small_and_detects_noise() {
    let pr = Fixed(4.0, 3.5);
    let sol = chain_solution(&pr, 2000);
    let base = residual(&sol, 1.0, &pr).unwrap();
    assert!(base < 1e-6, "{base}");
    let mut noisy = sol.laplacian.values().to_vec();
    for (i, v) in noisy.iter_mut().enumerate() {
        *v += 1e-3 * ((i * 7919) % 13) as f64 / 13.0;
    }
    let bad = Solution { u: sol.u.clone(), laplacian: GridFunction::new(sol.grid().clone(), noisy).unwrap() };
    assert!(residual(&bad, 1.0, &pr).unwrap() > 1e3 * base);
}

#[test]
fn exp_linear_case_matches_power_solver() {
    let md = estimate_m_delta(1.0, &MDeltaConfig::default()).unwrap().value;
    let e = solve_exp(&ExpProblem::new(3.0, Nonlinearity::Linear, md, 1.0).unwrap(), &cfg(2000)).unwrap();
    let p = solve_power(&power(3.0, 3.0, 2.0, Coefficient::Constant(1.0)), &cfg(2000)).unwrap();
    assert!((e.lambda - p.lambda).abs() <= 1e-4 * p.lambda);
    assert!((e.lambda * e.lambda_integral.unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn exp_catalog_restarts_agree() {
    let md = estimate_m_delta(1.0, &MDeltaConfig::default()).unwrap().value;
    let pr = ExpProblem::new(3.0, Nonlinearity::ExpQuadratic { a: 0.5 }, md, 1.0).unwrap();
    let r = solve_exp(&pr, &cfg(1500)).unwrap();
    assert!(r.converged && r.lambda > 0.0 && r.residual <= 1e-5);
    let (lo, hi) = r.restart_values.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!((hi - lo) <= 1e-3 * hi);
}

#[test]
fn m_delta_is_positive_refinement_stable_and_below_trials() {
    let a = estimate_m_delta(1.0, &MDeltaConfig { n: 1000, ..Default::default() }).unwrap();
    let b = estimate_m_delta(1.0, &MDeltaConfig { n: 2000, ..Default::default() }).unwrap();
    assert!(a.value > 0.0 && a.converged && b.converged);
    assert!((a.value - b.value).abs() <= 0.02 * b.value);
    let c = MDeltaConfig { n: 2000, ..Default::default() };
    for t in [|s: f64| 1.0 - s * s, |s: f64| 1.0 + s, |s: f64| (3.0 * s).cos()] {
        let q = m_delta_ratio(1.0, &c, t).unwrap();
        assert!(b.value <= q * (1.0 + 1e-9), "{} vs {q}", b.value);
    }
}

#[test]
fn m_delta_shrinks_with_truncation() {
    let a = estimate_m_delta(1.0, &MDeltaConfig { n: 1500, r_min: 1e-3, ..Default::default() }).unwrap();
    let b = estimate_m_delta(1.0, &MDeltaConfig { n: 1500, r_min: 1e-6, ..Default::default() }).unwrap();
    assert!(b.value < a.value);
}
