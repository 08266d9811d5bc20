//! Fixed families of radial test functions with exact derivatives.

use crate::error::Result;
use crate::functions::{Eval, RadialFunction};
use crate::moser::MoserSequence;
use crate::quadrature::Integrand;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{E, PI};
use std::sync::Arc;

fn closure(radius: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<RadialFunction> {
    RadialFunction::new(radius, vec![Arc::new(f) as Eval, Arc::new(df) as Eval])
}

/// Nonnegative, nonincreasing members of `X^{1,p}_R` with one derivative.
///
/// Every member satisfies `u(R) <= u(r)`, so it lies in `K_A` for `A = 1`.
pub fn k1_corpus(radius: f64) -> Result<Vec<(String, RadialFunction)>> {
    let r0 = radius;
    let mut out = vec![
        ("zero".to_string(), closure(r0, |_| 0.0, |_| 0.0)?),
        ("constant".to_string(), closure(r0, |_| 1.0, |_| 0.0)?),
        ("affine".to_string(), closure(r0, move |r| 2.0 - r / r0, move |_| -1.0 / r0)?),
        (
            "cosine".to_string(),
            closure(
                r0,
                move |r| 0.2 + (0.5 * PI * r / r0).cos(),
                move |r| -0.5 * PI / r0 * (0.5 * PI * r / r0).sin(),
            )?,
        ),
        (
            "sqrt-log".to_string(),
            closure(
                r0,
                move |r| (1.0 + r0 / r).ln().sqrt(),
                move |r| -0.5 / (1.0 + r0 / r).ln().sqrt() * r0 / (r * (r + r0)),
            )?,
        ),
        (
            "log-log".to_string(),
            closure(r0, move |r| (E + (r0 / r).ln()).ln(), move |r| -1.0 / (r * (E + (r0 / r).ln())))?,
        ),
    ];
    let seq = MoserSequence::new(1, radius, 8.0, 0.1, 1)?;
    out.push(("moser".to_string(), seq.radial_function(1)?));
    Ok(out)
}

/// Smooth members of the corpus, for identities checked by quadrature.
pub fn smooth_k1_corpus(radius: f64) -> Result<Vec<(String, RadialFunction)>> {
    Ok(k1_corpus(radius)?.into_iter().filter(|(n, _)| n != "moser" && n != "zero").collect())
}

/// Corpus members shifted to vanish at `R`, for the boundary-side Hardy inequality.
pub fn hardy_corpus(radius: f64) -> Result<Vec<(String, RadialFunction)>> {
    Ok(smooth_k1_corpus(radius)?
        .into_iter()
        .filter(|(n, _)| n != "constant")
        .map(|(n, u)| {
            let c = u.value(radius);
            (n, u.shifted(-c))
        })
        .collect())
}

/// Seeded smooth source `a₀ + a₁cos(b₁x) + a₂x² + a₃sin(b₂x)`, `x = r/R`.
pub fn random_smooth_source(seed: u64, radius: f64) -> Integrand {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = rng.random_range(0.5..1.5);
    let a1 = rng.random_range(-1.0..1.0);
    let a2 = rng.random_range(-1.0..1.0);
    let a3 = rng.random_range(-1.0..1.0);
    let b1 = rng.random_range(0.5..4.0);
    let b2 = rng.random_range(0.5..4.0);
    Arc::new(move |r: f64| {
        let x = r / radius;
        a0 + a1 * (b1 * x).cos() + a2 * x * x + a3 * (b2 * x).sin()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        for (name, u) in k1_corpus(2.0).unwrap() {
            for &r in &[0.01, 0.3, 1.7] {
                let h = 1e-6 * r;
                let fd = (u.value(r + h) - u.value(r - h)) / (2.0 * h);
                let d = u.eval(1, r).unwrap();
                assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "{name} at {r}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn members_are_nonincreasing_and_nonnegative() {
        for (name, u) in k1_corpus(1.0).unwrap() {
            let mut prev = f64::INFINITY;
            for i in 1..=200 {
                let r = i as f64 / 200.0;
                let v = u.value(r);
                assert!(v >= 0.0 && v <= prev + 1e-15, "{name}");
                prev = v;
            }
        }
    }
    #[test]
    fn hardy_members_vanish_at_the_boundary() {
        let c = hardy_corpus(1.5).unwrap();
        assert_eq!(c.len(), 4);
        for (name, u) in c {
            assert!(u.value(1.5).abs() < 1e-15, "{name}");
        }
    }

    #[test]
    fn random_sources_are_seeded() {
        let a = random_smooth_source(3, 1.0);
        let b = random_smooth_source(3, 1.0);
        let c = random_smooth_source(4, 1.0);
        assert_eq!(a(0.37), b(0.37));
        assert_ne!(a(0.37), c(0.37));
    }
}
