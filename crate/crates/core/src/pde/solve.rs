use super::diagnostics::{endpoint_diagnostics, residual, weak_form_defects, EndpointDiagnostics};
use super::problem::{ExpProblem, PowerProblem, Problem};
use crate::error::{invalid, Error, Result};
use crate::functions::GridFunction;
use crate::operators::GridGreen;
use crate::quadrature::{Grid, NodalRule};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub n: usize,
    /// Smallest node as a fraction of `R`.
    pub r_min: f64,
    /// Stop when the `Δ_α`-norm of the update falls below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Origin diagnostics sample near `floor·R·{1, 2, 4}`.
    pub floor: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { n: 2000, r_min: 1e-6, tol: 1e-12, max_iters: 20_000, floor: 1e-3, seed: 0, restarts: 3 }
    }
}

/// Nodal `u` together with its exact-chain `Δ_α u`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub u: GridFunction,
    pub laplacian: GridFunction,
}

impl Solution {
    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn scaled(&self, c: f64) -> Solution {
        let s = |g: &GridFunction| GridFunction::new(g.grid().clone(), g.values().iter().map(|v| c * v).collect());
        Solution { u: s(&self.u).unwrap(), laplacian: s(&self.laplacian).unwrap() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingExponent {
    /// `λ^{1/(p−2)}`.
    PMinus2,
    /// `λ^{1/(p−1)}`.
    PMinus1,
}

/// Residuals of `Δ_α² ũ = r^{θ−α} g |ũ|^{p−2} ũ` for `ũ = λ^e u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    pub residual_p_minus_2: f64,
    pub residual_p_minus_1: f64,
    pub preferred: ScalingExponent,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Normalized so that `‖u‖_{Δ_α} = 1`.
    pub solution: Solution,
    /// Multiplier in `Δ_α² u = λ r^{θ−α} q(r, u)`.
    pub lambda: f64,
    /// `∫ f(r, u) u r^θ dr` for the exponential problem.
    pub lambda_integral: Option<f64>,
    /// `‖u‖²_{Δ_α} / (∫ g |u|^p r^θ)^{2/p}`, or the objective `∫ F(r,u) r^θ` for the exponential problem.
    pub rayleigh: f64,
    pub residual: f64,
    pub endpoints: EndpointDiagnostics,
    pub weak_defects: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub scaling: Option<ScalingCheck>,
    pub restart_values: Vec<f64>,
}

struct Chain {
    green: GridGreen,
    nodes: Vec<f64>,
    qa: Vec<f64>,
    qt: Vec<f64>,
    weight: Vec<f64>,
}

impl Chain {
    fn new(problem: &dyn Problem, cfg: &SolveConfig) -> Result<Self> {
        if cfg.n < 64 {
            return invalid(format!("grid too small: {}", cfg.n));
        }
        let grid = Grid::geometric_span(problem.radius(), cfg.r_min * problem.radius(), cfg.n)?;
        let (a, t) = (problem.alpha(), problem.theta());
        Ok(Chain {
            nodes: grid.nodes().to_vec(),
            qa: NodalRule::new(&grid, a)?.weights(),
            qt: NodalRule::new(&grid, t)?.weights(),
            weight: grid.nodes().iter().map(|r| r.powf(t - a)).collect(),
            green: GridGreen::new(&grid, a)?,
        })
    }

    fn source(&self, problem: &dyn Problem, u: &[f64]) -> Result<Vec<f64>> {
        self.nodes.iter().zip(u).zip(&self.weight).map(|((&r, &v), w)| Ok(w * problem.source(r, v)?)).collect()
    }

    fn norm(&self, w: &[f64]) -> f64 {
        w.iter().zip(&self.qa).map(|(x, q)| q * x * x).sum::<f64>().sqrt()
    }

    /// `(G h, G G h)` for `h = r^{θ−α} q(r, u)`.
    fn apply(&self, problem: &dyn Problem, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let b = self.green.apply(&self.source(problem, u)?).u;
        let a = self.green.apply(&b).u;
        Ok((b, a))
    }

    fn solution(&self, u: Vec<f64>, w: Vec<f64>) -> Result<Solution> {
        let grid = self.green.grid().clone();
        Ok(Solution { u: GridFunction::new(grid.clone(), u)?, laplacian: GridFunction::new(grid, w)? })
    }
}

fn diff_norm(chain: &Chain, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    chain.norm(&d)
}

/// `‖G w‖²_{Δ_α} / (∫ g |G w|^p r^θ)^{2/p}` for a trial `w = Δ_α u` on the solver grid.
pub fn rayleigh_quotient(problem: &PowerProblem, cfg: &SolveConfig, w: impl Fn(f64) -> f64) -> Result<f64> {
    let chain = Chain::new(problem, cfg)?;
    let wv: Vec<f64> = chain.nodes.iter().map(|&r| w(r)).collect();
    let u = chain.green.apply(&wv).u;
    Ok(quotient(&chain, problem, &u, &wv))
}

fn quotient(chain: &Chain, problem: &PowerProblem, u: &[f64], w: &[f64]) -> f64 {
    let num = chain.norm(w).powi(2);
    let den: f64 = chain
        .nodes
        .iter()
        .zip(u)
        .zip(&chain.qt)
        .map(|((&r, v), q)| q * problem.g.eval(r, problem.radius) * v.abs().powf(problem.p))
        .sum();
    num / den.powf(2.0 / problem.p)
}

/// Normalized fixed-point iteration `u ← T(u)/‖T(u)‖_{Δ_α}`, `T = G_α G_α (r^{θ−α} g |u|^{p−2} u)`.
///
/// The start is `G_α G_α(r^{θ−α} g)` scaled by `sign`. When the update norm
/// grows the step is averaged with the current iterate.
pub fn solve_power(problem: &PowerProblem, cfg: &SolveConfig) -> Result<SolveReport> {
    solve_power_with_sign(problem, cfg, 1.0)
}

/// [`solve_power`] started from `sign · G_α G_α(r^{θ−α} g)`.
pub fn solve_power_with_sign(problem: &PowerProblem, cfg: &SolveConfig, sign: f64) -> Result<SolveReport> {
    let chain = Chain::new(problem, cfg)?;
    let ones = vec![sign; chain.nodes.len()];
    let (mut w, mut u) = chain.apply(problem, &ones)?;
    let n0 = chain.norm(&w);
    w.iter_mut().for_each(|x| *x /= n0);
    u.iter_mut().for_each(|x| *x /= n0);
    let mut prev_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        let (b, a) = chain.apply(problem, &u)?;
        let tau = chain.norm(&b);
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Iteration(format!("fixed-point map degenerated (norm {tau})")));
        }
        let mut wn: Vec<f64> = b.iter().map(|x| x / tau).collect();
        let mut un: Vec<f64> = a.iter().map(|x| x / tau).collect();
        let mut step = diff_norm(&chain, &wn, &w);
        if step > prev_step {
            for i in 0..wn.len() {
                wn[i] = 0.5 * (wn[i] + w[i]);
                un[i] = 0.5 * (un[i] + u[i]);
            }
            let s = chain.norm(&wn);
            wn.iter_mut().for_each(|x| *x /= s);
            un.iter_mut().for_each(|x| *x /= s);
            step = diff_norm(&chain, &wn, &w);
        }
        w = wn;
        u = un;
        prev_step = step;
        if step < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged && !(prev_step < 1e3 * cfg.tol) {
        return Err(Error::Iteration(format!("power iteration stalled at step {prev_step:e} after {iterations} iterations")));
    }
    // multiplier from the final map T(u) = τ u
    let (b, _) = chain.apply(problem, &u)?;
    let lambda = 1.0 / chain.norm(&b);
    let rayleigh = quotient(&chain, problem, &u, &w);
    let solution = chain.solution(u, w)?;
    let scaling = if problem.p > 2.0 {
        let check = |e: f64| {
            let c = lambda.powf(e);
            residual(&solution.scaled(c), 1.0, problem)
        };
        let (r2, r1) = (check(1.0 / (problem.p - 2.0))?, check(1.0 / (problem.p - 1.0))?);
        Some(ScalingCheck {
            residual_p_minus_2: r2,
            residual_p_minus_1: r1,
            preferred: if r2 <= r1 { ScalingExponent::PMinus2 } else { ScalingExponent::PMinus1 },
        })
    } else {
        None
    };
    Ok(SolveReport {
        residual: residual(&solution, lambda, problem)?,
        endpoints: endpoint_diagnostics(&solution, lambda, problem, cfg.floor)?,
        weak_defects: weak_form_defects(&solution, lambda, problem)?,
        solution,
        lambda,
        lambda_integral: None,
        rayleigh,
        iterations,
        converged,
        scaling,
        restart_values: vec![lambda],
    })
}

struct ExpRun {
    w: Vec<f64>,
    u: Vec<f64>,
    objective: f64,
    iterations: usize,
    converged: bool,
}

fn exp_objective(chain: &Chain, problem: &ExpProblem, u: &[f64]) -> f64 {
    u.iter().zip(&chain.qt).map(|(v, q)| q * problem.primitive(*v)).sum()
}

fn exp_ascent(chain: &Chain, problem: &ExpProblem, mut w: Vec<f64>, cfg: &SolveConfig) -> Result<ExpRun> {
    let s = chain.norm(&w);
    w.iter_mut().for_each(|x| *x /= s);
    let mut u = chain.green.apply(&w).u;
    let mut objective = exp_objective(chain, problem, &u);
    for it in 1..=cfg.max_iters {
        // Riesz representative of the derivative of ∫F(r, G w) r^θ in L²_3
        let d = chain.green.apply(&chain.source(problem, &u)?).u;
        let dn = chain.norm(&d);
        let mut accepted = None;
        let mut t = f64::INFINITY;
        for _ in 0..60 {
            let mut v: Vec<f64> =
                if t.is_infinite() { d.clone() } else { w.iter().zip(&d).map(|(a, b)| a + t * b / dn).collect() };
            let vn = chain.norm(&v);
            v.iter_mut().for_each(|x| *x /= vn);
            let uv = chain.green.apply(&v).u;
            let val = exp_objective(chain, problem, &uv);
            if val >= objective {
                accepted = Some((v, uv, val));
                break;
            }
            t = if t.is_infinite() { 1.0 } else { 0.5 * t };
        }
        let Some((v, uv, val)) = accepted else {
            return Ok(ExpRun { w, u, objective, iterations: it, converged: true });
        };
        let step = diff_norm(chain, &v, &w);
        w = v;
        u = uv;
        objective = val;
        if step < cfg.tol {
            return Ok(ExpRun { w, u, objective, iterations: it, converged: true });
        }
    }
    Ok(ExpRun { w, u, objective, iterations: cfg.max_iters, converged: false })
}

/// Maximizes `∫ F(r, u) r^θ dr` over `‖u‖_{Δ_3} = 1` by projected ascent in `w = Δ_3 u`.
///
/// Restarts draw positive random starts from `cfg.seed`; the report keeps the
/// best objective. `lambda` is the strong-form multiplier `1/‖G_3(r^{θ−3} f(u))‖_{Δ_3}`
/// and `lambda_integral = ∫ f(r,u) u r^θ dr`.
pub fn solve_exp(problem: &ExpProblem, cfg: &SolveConfig) -> Result<SolveReport> {
    if cfg.restarts == 0 {
        return invalid("at least one restart is required");
    }
    let chain = Chain::new(problem, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radius = problem.radius;
    let mut best: Option<ExpRun> = None;
    let mut restart_values = Vec::with_capacity(cfg.restarts);
    let mut iterations = 0;
    let mut converged = true;
    for _ in 0..cfg.restarts {
        let a: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.1..1.0));
        let w0: Vec<f64> = chain
            .nodes
            .iter()
            .map(|&r| {
                let s = r / radius;
                a[0] * (1.0 - s * s) + a[1] * (1.0 - s) + a[2] * (0.5 * std::f64::consts::PI * s).cos()
            })
            .collect();
        let run = exp_ascent(&chain, problem, w0, cfg)?;
        iterations += run.iterations;
        converged &= run.converged;
        let lam = lambda_of(&chain, problem, &run.u)?;
        restart_values.push(lam);
        if best.as_ref().is_none_or(|b| run.objective > b.objective) {
            best = Some(run);
        }
    }
    let run = best.unwrap();
    let lambda = lambda_of(&chain, problem, &run.u)?;
    let lambda_integral: f64 =
        run.u.iter().zip(&chain.qt).map(|(v, q)| q * problem.f(*v) * v).sum();
    let solution = chain.solution(run.u, run.w)?;
    Ok(SolveReport {
        residual: residual(&solution, lambda, problem)?,
        endpoints: endpoint_diagnostics(&solution, lambda, problem, cfg.floor)?,
        weak_defects: weak_form_defects(&solution, lambda, problem)?,
        solution,
        lambda,
        lambda_integral: Some(lambda_integral),
        rayleigh: run.objective,
        iterations,
        converged,
        scaling: None,
        restart_values,
    })
}

fn lambda_of(chain: &Chain, problem: &ExpProblem, u: &[f64]) -> Result<f64> {
    let d = chain.green.apply(&chain.source(problem, u)?).u;
    Ok(1.0 / chain.norm(&d))
}
