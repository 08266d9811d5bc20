use crate::error::{invalid, Error, Result};

/// Source term `q(r, t)` of `Δ_α² u = λ r^{θ−α} q(r, u)`.
pub trait Problem {
    fn alpha(&self) -> f64;
    fn theta(&self) -> f64;
    fn radius(&self) -> f64;
    fn source(&self, r: f64, t: f64) -> Result<f64>;
}

/// Positive coefficient `g` on `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// `a + b r/R`.
    Affine { a: f64, b: f64 },
}

impl Coefficient {
    pub fn eval(&self, r: f64, radius: f64) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Affine { a, b } => a + b * r / radius,
        }
    }

    fn is_positive(&self) -> bool {
        match *self {
            Coefficient::Constant(c) => c > 0.0,
            Coefficient::Affine { a, b } => a > 0.0 && a + b > 0.0,
        }
    }

    pub fn scaled(&self, s: f64) -> Coefficient {
        match *self {
            Coefficient::Constant(c) => Coefficient::Constant(s * c),
            Coefficient::Affine { a, b } => Coefficient::Affine { a: s * a, b: s * b },
        }
    }
}

/// `Δ_α² u = λ r^{θ−α} g |u|^{p−2} u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProblem {
    pub alpha: f64,
    pub theta: f64,
    pub p: f64,
    pub g: Coefficient,
    pub radius: f64,
}

impl PowerProblem {
    /// Requires `α >= 3`, `θ > α − 1` and `2 <= p < 2(θ+1)/(α−3)`.
    pub fn new(alpha: f64, theta: f64, p: f64, g: Coefficient, radius: f64) -> Result<Self> {
        if !(alpha >= 3.0) {
            return invalid(format!("α must be at least 3, got {alpha}"));
        }
        if !(theta > alpha - 1.0) {
            return invalid(format!("need θ > α − 1, got θ={theta}, α={alpha}"));
        }
        let cap = if alpha > 3.0 { 2.0 * (theta + 1.0) / (alpha - 3.0) } else { f64::INFINITY };
        if !(p >= 2.0 && p < cap) {
            return invalid(format!("need 2 <= p < {cap}, got {p}"));
        }
        if !g.is_positive() || !(radius > 0.0) {
            return invalid("coefficient must be positive on [0, R] and R > 0");
        }
        Ok(PowerProblem { alpha, theta, p, g, radius })
    }
}

impl Problem for PowerProblem {
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn theta(&self) -> f64 {
        self.theta
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn source(&self, r: f64, t: f64) -> Result<f64> {
        Ok(self.g.eval(r, self.radius) * t.abs().powf(self.p - 2.0) * t)
    }
}

/// Odd nonlinearity `f(r, t)` with primitive `F(r, t) = ∫_0^t f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// `f = t`.
    Linear,
    /// `f = t exp(a (m_Δ t)²)`.
    ExpQuadratic { a: f64 },
}

/// `Δ_3² u = λ r^{θ−3} f(r, u)` with `|f(r,t)| <= c₁ e^{μ(m_Δ t)²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpProblem {
    pub theta: f64,
    pub f: Nonlinearity,
    pub m_delta: f64,
    pub radius: f64,
    pub mu: f64,
    pub c1: f64,
}

impl ExpProblem {
    /// Growth constants are chosen with `μ` halfway between the exponent of
    /// `f` and `θ + 1`, and `c₁ = sup_t t e^{−(μ−a)(m_Δ t)²}`.
    pub fn new(theta: f64, f: Nonlinearity, m_delta: f64, radius: f64) -> Result<Self> {
        if !(theta > 2.0) {
            return invalid(format!("θ must exceed 2, got {theta}"));
        }
        if !(m_delta > 0.0) || !(radius > 0.0) {
            return invalid("m_Δ and R must be positive");
        }
        let a = match f {
            Nonlinearity::Linear => 0.0,
            Nonlinearity::ExpQuadratic { a } => a,
        };
        if !(a >= 0.0 && a < theta + 1.0) {
            return invalid(format!("exponent {a} must lie in [0, θ+1)"));
        }
        let mu = 0.5 * (a + theta + 1.0);
        let c1 = 1.0 / (m_delta * (2.0 * (mu - a) * std::f64::consts::E).sqrt());
        Ok(ExpProblem { theta, f, m_delta, radius, mu, c1 })
    }

    pub fn f(&self, t: f64) -> f64 {
        match self.f {
            Nonlinearity::Linear => t,
            Nonlinearity::ExpQuadratic { a } => t * (a * (self.m_delta * t).powi(2)).exp(),
        }
    }

    /// `F(t) = ∫_0^t f`.
    pub fn primitive(&self, t: f64) -> f64 {
        match self.f {
            Nonlinearity::Linear => 0.5 * t * t,
            Nonlinearity::ExpQuadratic { a } if a == 0.0 => 0.5 * t * t,
            Nonlinearity::ExpQuadratic { a } => {
                let m2 = self.m_delta * self.m_delta;
                (a * m2 * t * t).exp_m1() / (2.0 * a * m2)
            }
        }
    }
}

impl Problem for ExpProblem {
    fn alpha(&self) -> f64 {
        3.0
    }
    fn theta(&self) -> f64 {
        self.theta
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn source(&self, _r: f64, t: f64) -> Result<f64> {
        let v = self.f(t);
        let bound = self.c1 * (self.mu * (self.m_delta * t).powi(2)).exp();
        if !(v.abs() <= bound * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("growth bound violated at t = {t}: |f| = {v}, bound {bound}")));
        }
        Ok(v)
    }
}
