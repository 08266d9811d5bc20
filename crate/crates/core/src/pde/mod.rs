//! Radial fourth-order Navier problems `Δ_α² u = λ r^{θ−α} q(r, u)` on `(0, R]`
//! with `u(R) = Δ_α u(R) = 0`, solved through the composed Green inverse.

mod diagnostics;
mod mdelta;
mod problem;
mod solve;

pub use diagnostics::{endpoint_diagnostics, residual, weak_form_defects, EndpointDiagnostics, TEST_FUNCTIONS};
pub use mdelta::{estimate_m_delta, m_delta_ratio, MDeltaConfig, MDeltaEstimate};
pub use problem::{Coefficient, ExpProblem, Nonlinearity, PowerProblem, Problem};
pub use solve::{
    rayleigh_quotient, solve_exp, solve_power, solve_power_with_sign, ScalingCheck, ScalingExponent, Solution, SolveConfig, SolveReport,
};
