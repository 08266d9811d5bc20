use super::gauss::{legendre8, GaussTable};
use crate::error::{invalid, Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Panel layout and limits for the weighted rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Geometric ratio between consecutive panel edges.
    pub ratio: f64,
    /// Number of graded panels above the innermost one.
    pub panels: usize,
    /// Gauss order per panel.
    pub order: usize,
    /// Cap on the number of panels created by adaptive halving.
    pub max_panels: usize,
    /// Cap on the number of extra geometric panels added toward the origin.
    pub max_tail_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { ratio: 0.7, panels: 40, order: 8, max_panels: 20_000, max_tail_panels: 4_000 }
    }
}

/// Value and error bound of an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Contribution ratios above this are treated as non-decaying.
const STALL: f64 = 1.0 - 1e-8;

#[inline]
fn weight(r: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        1.0
    } else {
        r.powf(theta)
    }
}

/// Fixed composite rule for `∫_0^R f(r) r^theta dr`.
///
/// The innermost panel `[0, R ratio^panels]` carries a Gauss-Jacobi rule for
/// the weight, all others Gauss-Legendre. Every node lies in `(0, R)` and all
/// weights are positive.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    theta: f64,
    radius: f64,
    order: usize,
    panels: Vec<(f64, f64)>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(theta: f64, radius: f64, cfg: &QuadConfig) -> Result<Self> {
        if !(theta > -1.0) {
            return invalid(format!("weight exponent must exceed -1, got {theta}"));
        }
        if !(radius > 0.0) {
            return invalid(format!("radius must be positive, got {radius}"));
        }
        if !(cfg.ratio > 0.0 && cfg.ratio < 1.0) || cfg.panels == 0 || cfg.order == 0 {
            return invalid("panel ratio must lie in (0, 1) with at least one panel");
        }
        let mut panels = Vec::with_capacity(cfg.panels + 1);
        let inner = radius * cfg.ratio.powi(cfg.panels as i32);
        panels.push((0.0, inner));
        for j in (0..cfg.panels).rev() {
            let hi = radius * cfg.ratio.powi(j as i32);
            let lo = radius * cfg.ratio.powi(j as i32 + 1);
            panels.push((lo, if j == 0 { radius } else { hi }));
        }
        Ok(Self::from_panels(theta, radius, cfg.order, panels))
    }

    fn from_panels(theta: f64, radius: f64, order: usize, panels: Vec<(f64, f64)>) -> Self {
        let gl = GaussTable::legendre(order);
        let gj = GaussTable::jacobi_origin(order, theta);
        let mut nodes = Vec::with_capacity(panels.len() * order);
        let mut weights = Vec::with_capacity(panels.len() * order);
        for &(lo, hi) in &panels {
            if lo == 0.0 {
                let h = 0.5 * hi;
                let scale = h.powf(theta + 1.0);
                for (x, w) in gj.x.iter().zip(&gj.w) {
                    nodes.push(h * (1.0 + x));
                    weights.push(w * scale);
                }
            } else {
                let h = 0.5 * (hi - lo);
                let c = 0.5 * (hi + lo);
                for (x, w) in gl.x.iter().zip(&gl.w) {
                    let r = c + h * x;
                    nodes.push(r);
                    weights.push(w * h * weight(r, theta));
                }
            }
        }
        QuadratureRule { theta, radius, order, panels, nodes, weights }
    }

    /// Same layout with every panel halved.
    pub fn refined(&self) -> Self {
        let mut panels = Vec::with_capacity(2 * self.panels.len());
        for &(lo, hi) in &self.panels {
            let mid = 0.5 * (lo + hi);
            panels.push((lo, mid));
            panels.push((mid, hi));
        }
        Self::from_panels(self.theta, self.radius, self.order, panels)
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }

    pub fn panels(&self) -> &[(f64, f64)] {
        &self.panels
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err.total_cmp(&o.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

struct Engine<'a, F: FnMut(f64) -> f64> {
    f: F,
    theta: f64,
    gl: &'a GaussTable,
}

impl<F: FnMut(f64) -> f64> Engine<'_, F> {
    fn gauss(&mut self, lo: f64, hi: f64) -> f64 {
        let theta = self.theta;
        let f = &mut self.f;
        self.gl.integrate(lo, hi, |r| f(r) * weight(r, theta))
    }

    fn panel(&mut self, lo: f64, hi: f64) -> Result<Panel> {
        let mid = if lo > 0.0 && hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let whole = self.gauss(lo, hi);
        let halves = self.gauss(lo, mid) + self.gauss(mid, hi);
        if !halves.is_finite() || !whole.is_finite() {
            return Err(Error::Divergent(format!("non-finite integrand on [{lo:e}, {hi:e}]")));
        }
        Ok(Panel { lo, hi, value: halves, err: (whole - halves).abs() })
    }

    fn split(&mut self, p: Panel) -> Result<(Panel, Panel)> {
        let mid = if p.lo > 0.0 && p.hi > 4.0 * p.lo { (p.lo * p.hi).sqrt() } else { 0.5 * (p.lo + p.hi) };
        Ok((self.panel(p.lo, mid)?, self.panel(mid, p.hi)?))
    }
}

/// `∫_0^R f(r) r^theta dr` to relative tolerance `tol`, with default panels.
pub fn integrate_weighted(f: impl FnMut(f64) -> f64, theta: f64, radius: f64, tol: f64) -> Result<f64> {
    integrate_weighted_with(f, theta, 0.0, radius, tol, &QuadConfig::default()).map(|e| e.value)
}

/// `∫_a^b f(r) r^theta dr` for `0 < a < b`.
pub fn integrate_interval(f: impl FnMut(f64) -> f64, theta: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0) {
        return invalid(format!("lower limit must be positive, got {a}"));
    }
    integrate_weighted_with(f, theta, a, b, tol, &QuadConfig::default()).map(|e| e.value)
}

/// Adaptive weighted integral over `[a, b]`, `a >= 0`.
///
/// Panels are graded geometrically toward `a` and halved where the
/// two-level Gauss estimate disagrees. When `a = 0` further geometric panels
/// are added toward the origin until the extrapolated remainder stabilises;
/// the origin itself is never sampled. The tolerance is relative to the
/// integral of `|f| r^theta`.
pub fn integrate_weighted_with(
    f: impl FnMut(f64) -> f64,
    theta: f64,
    a: f64,
    b: f64,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    if !(b > a) || !(a >= 0.0) || !b.is_finite() {
        return invalid(format!("need 0 <= a < b, got [{a}, {b}]"));
    }
    if a == 0.0 && !(theta > -1.0) {
        return invalid(format!("weight exponent must exceed -1, got {theta}"));
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let gl_owned;
    let gl = if cfg.order == 8 {
        legendre8()
    } else {
        gl_owned = GaussTable::legendre(cfg.order);
        &gl_owned
    };
    let mut eng = Engine { f, theta, gl };
    let mut heap = BinaryHeap::new();

    let mut hi = b;
    let mut count = 0;
    loop {
        let lo = hi * cfg.ratio;
        if a > 0.0 && lo <= a * (1.0 + 1e-12) {
            heap.push(eng.panel(a, hi)?);
            break;
        }
        heap.push(eng.panel(lo, hi)?);
        hi = lo;
        count += 1;
        if a == 0.0 && count == cfg.panels {
            break;
        }
    }

    let scale_of = |heap: &BinaryHeap<Panel>| heap.iter().map(|p| p.value.abs()).sum::<f64>();

    let mut remainder = 0.0;
    let mut tail_err = 0.0;
    if a == 0.0 {
        let gj = GaussTable::jacobi_origin(cfg.order, theta);
        let mut edge = hi;
        let mut contrib: Vec<f64> = Vec::new();
        let mut partial = 0.0;
        let mut prev_total = f64::NAN;
        let mut rising = 0usize;
        let base = scale_of(&heap);
        let mut done = false;
        for k in 0..cfg.max_tail_panels {
            let lo = edge * cfg.ratio;
            if !(lo > 1e-300) {
                break;
            }
            let p = eng.panel(lo, edge)?;
            heap.push(p);
            contrib.push(p.value);
            partial += p.value;
            edge = lo;
            let tol_t = 0.25 * tol * (base + contrib.iter().map(|c| c.abs()).sum::<f64>());
            let jac = {
                let f = &mut eng.f;
                gj.integrate_origin(edge, theta, |r| f(r))
            };
            if k < 2 {
                continue;
            }
            let (c1, c0) = (contrib[k], contrib[k - 1]);
            let rem = if c1 == 0.0 && c0 == 0.0 {
                Some(0.0)
            } else if c0 != 0.0 && c1 / c0 >= 0.0 && c1 / c0 < STALL {
                let rho = c1 / c0;
                Some(c1 * rho / (1.0 - rho))
            } else {
                None
            };
            if c0 != 0.0 && c1 / c0 >= STALL {
                rising += 1;
                if rising >= 30 {
                    return Err(Error::Divergent(format!(
                        "panel contributions grow toward the origin (ratio {:.4})",
                        c1 / c0
                    )));
                }
            } else {
                rising = 0;
            }
            let rem_v = rem.unwrap_or(jac);
            let total = partial + rem_v;
            let step = (total - prev_total).abs();
            prev_total = total;
            let agree = rem.is_some() && (rem_v - jac).abs() <= tol_t;
            if step <= tol_t || agree || (rem.is_some() && rem_v.abs() <= 1e-3 * tol_t) {
                remainder = rem_v;
                tail_err = if agree { (rem_v - jac).abs() } else { step.min((rem_v - jac).abs()) };
                done = true;
                break;
            }
            remainder = rem_v;
            tail_err = step.min((rem_v - jac).abs());
        }
        if !done {
            let estimate = heap.iter().map(|p| p.value).sum::<f64>() + remainder;
            return Err(Error::NotConverged { estimate, error_bound: tail_err });
        }
    }

    let mut errsum: f64 = heap.iter().map(|p| p.err).sum();
    let mut scale = scale_of(&heap);
    let mut passes = 0usize;
    while errsum > 0.5 * tol * scale && errsum > 0.0 {
        if heap.len() >= cfg.max_panels {
            let estimate = heap.iter().map(|p| p.value).sum::<f64>() + remainder;
            return Err(Error::NotConverged { estimate, error_bound: errsum + tail_err });
        }
        let p = heap.pop().unwrap();
        let (l, r) = eng.split(p)?;
        errsum += l.err + r.err - p.err;
        scale += l.value.abs() + r.value.abs() - p.value.abs();
        heap.push(l);
        heap.push(r);
        passes += 1;
        if passes % 256 == 0 {
            errsum = heap.iter().map(|p| p.err).sum();
            scale = scale_of(&heap);
        }
    }
    let value = heap.iter().map(|p| p.value).sum::<f64>() + remainder;
    Ok(Estimate { value, error: errsum + tail_err, panels: heap.len() })
}
