//! Weighted quadrature on `(0, R]` for the measure `r^theta dr`.

mod adaptive;
mod cumulative;
mod gauss;
mod grid;
mod nodal;

pub use adaptive::{
    integrate_interval, integrate_weighted, integrate_weighted_with, Estimate, QuadConfig, QuadratureRule,
};
pub use cumulative::{cumulative_integral, CumulativeIntegral, Integrand};
pub use gauss::{integrate_smooth, GaussTable};
pub use grid::{build_grid, Grid};
pub use nodal::{dual_cell_weights, NodalRule};

#[allow(unused_imports)]
pub(crate) use gauss::{legendre16, legendre8};
