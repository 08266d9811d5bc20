use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use std::num::NonZeroUsize;
use std::sync::OnceLock;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussTable {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl GaussTable {
    pub fn legendre(order: usize) -> GaussTable {
        let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order > 0"));
        let (x, w) = rule.as_node_weight_pairs().iter().copied().unzip();
        GaussTable { x, w }
    }

    /// Weight `(1 + x)^theta`, for the panel touching the origin.
    pub fn jacobi_origin(order: usize, theta: f64) -> GaussTable {
        if theta == 0.0 {
            return GaussTable::legendre(order);
        }
        let rule = GaussJacobi::new(
            NonZeroUsize::new(order).expect("order > 0"),
            FiniteAboveNegOneF64::new(0.0).unwrap(),
            FiniteAboveNegOneF64::new(theta).expect("theta > -1"),
        );
        let (x, w) = rule.as_node_weight_pairs().iter().copied().unzip();
        GaussTable { x, w }
    }

    /// `∫_lo^hi f`.
    #[inline]
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        let mut s = 0.0;
        for (x, w) in self.x.iter().zip(&self.w) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// `∫_0^a f(r) r^theta dr` for a table built by [`GaussTable::jacobi_origin`].
    #[inline]
    pub fn integrate_origin(&self, a: f64, theta: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * a;
        let mut s = 0.0;
        for (x, w) in self.x.iter().zip(&self.w) {
            s += w * f(h * (1.0 + x));
        }
        s * h.powf(theta + 1.0)
    }
}

pub(crate) fn legendre8() -> &'static GaussTable {
    static T: OnceLock<GaussTable> = OnceLock::new();
    T.get_or_init(|| GaussTable::legendre(8))
}

pub(crate) fn legendre16() -> &'static GaussTable {
    static T: OnceLock<GaussTable> = OnceLock::new();
    T.get_or_init(|| GaussTable::legendre(16))
}

/// `∫_a^b f` for smooth `f`: composite 16-point Gauss-Legendre, doubling the
/// panel count until two successive sums agree to `tol` relative to `∫|f|`.
pub fn integrate_smooth(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> crate::Result<f64> {
    if !(b >= a) || !a.is_finite() || !b.is_finite() {
        return crate::error::invalid(format!("need finite a <= b, got [{a}, {b}]"));
    }
    if a == b {
        return Ok(0.0);
    }
    let t = legendre16();
    let sum = |n: usize, f: &mut dyn FnMut(f64) -> f64| {
        let h = (b - a) / n as f64;
        let (mut s, mut s_abs) = (0.0, 0.0);
        for i in 0..n {
            let c = a + (i as f64 + 0.5) * h;
            for (x, w) in t.x.iter().zip(&t.w) {
                let y = f(c + 0.5 * h * x);
                s += w * y;
                s_abs += w * y.abs();
            }
        }
        (0.5 * h * s, 0.5 * h * s_abs)
    };
    let (mut prev, _) = sum(4, &mut f);
    let mut n = 8;
    while n <= 1 << 14 {
        let (cur, abs) = sum(n, &mut f);
        if !cur.is_finite() {
            return Err(crate::Error::Divergent(format!("non-finite integrand on [{a}, {b}]")));
        }
        if (cur - prev).abs() <= tol * abs.max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
        n *= 2;
    }
    Err(crate::Error::NotConverged { estimate: prev, error_bound: f64::NAN })
}
