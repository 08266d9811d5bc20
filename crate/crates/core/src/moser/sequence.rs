use super::{mu0, MoserSequence};
use crate::error::{invalid, Result};
use crate::quadrature::integrate_smooth;
use crate::spaces::{Regime, SpaceParams};
use crate::special::factorial;

const TOL: f64 = 1e-13;

/// Breakpoints of `H` in `t` on `[0, 1]`.
fn pieces(seq: &MoserSequence) -> [(f64, f64); 3] {
    let e = seq.profile().eps();
    [(0.0, e), (e, 1.0 - e), (1.0 - e, 1.0)]
}

/// `∫_{R/m}^R g(r) r^β dr` via `r = R m^{−t}`.
fn integrate_in_t(seq: &MoserSequence, beta: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let l = seq.log_m();
    let mut s = 0.0;
    for (a, b) in pieces(seq) {
        s += integrate_smooth(
            |t| {
                let r = seq.radius_at(t);
                g(r) * r.powf(beta + 1.0) * l
            },
            a,
            b,
            TOL,
        )?;
    }
    Ok(s)
}

/// Norm of a Moser sequence in `X^{k,p}_R(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceNormReport {
    /// `‖ψ^(j)‖^p_{L^p_{α_j}}`, `j = 0..=k`.
    pub terms: Vec<f64>,
    /// `‖ψ‖^p`.
    pub norm_p: f64,
    /// `‖ψ‖^p (log m)^{p−1}`.
    pub rescaled: f64,
    /// `[(k−1)!]^p (1 + 2^p ε ‖φ'‖^p_∞)`.
    pub bound: f64,
    pub slope_sup: f64,
}

fn norm_terms(seq: &MoserSequence, space: &SpaceParams) -> Result<Vec<f64>> {
    let p = space.p;
    (0..=space.k)
        .map(|j| {
            let a = space.alpha[j];
            let body = integrate_in_t(seq, a, |r| seq.derivative(j, r).abs().powf(p))?;
            let flat = if j == 0 { seq.radius_at(1.0).powf(a + 1.0) / (a + 1.0) } else { 0.0 };
            Ok(body + flat)
        })
        .collect()
}

pub fn sequence_norm_report(seq: &MoserSequence, space: &SpaceParams) -> Result<SequenceNormReport> {
    if space.regime() != Regime::AdamsTrudingerMoser {
        return invalid(format!("Moser sequences need the critical regime, got {}", space.regime()));
    }
    if seq.k() != space.k || (seq.radius() - space.radius).abs() > 1e-15 * space.radius {
        return invalid("sequence order or radius does not match the space");
    }
    if seq.profile().max_order() < space.k {
        return invalid("sequence carries too few derivatives for the space");
    }
    for i in 1..space.k {
        if !(space.alpha[i] - i as f64 * space.p + 1.0 > 0.0) {
            return invalid(format!("need α_{i} − {i}p + 1 > 0"));
        }
    }
    let terms = norm_terms(seq, space)?;
    let norm_p: f64 = terms.iter().sum();
    let p = space.p;
    let slope_sup = seq.profile().slope_sup();
    Ok(SequenceNormReport {
        rescaled: norm_p * seq.log_m().powf(p - 1.0),
        bound: factorial(space.k - 1).powf(p) * (1.0 + 2f64.powf(p) * seq.profile().eps() * slope_sup.powf(p)),
        terms,
        norm_p,
        slope_sup,
    })
}

/// `∫_0^R exp(μ |ψ/c|^{p'}) r^θ dr`, split as the exact flat part on `(0, R/m]`
/// plus the profile part.
pub fn moser_functional_sequence(seq: &MoserSequence, c: f64, mu: f64, p: f64, theta: f64) -> Result<(f64, f64)> {
    let q = p / (p - 1.0);
    let flat = (mu * (1.0 / c).powf(q)).exp() * seq.radius_at(1.0).powf(theta + 1.0) / (theta + 1.0);
    let body = integrate_in_t(seq, theta, |r| (mu * (seq.derivative(0, r) / c).abs().powf(q)).exp())?;
    Ok((flat + body, flat))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRow {
    pub m: f64,
    /// `‖ψ‖_{X^{k,p}_R}`.
    pub norm: f64,
    /// Functional at `ψ/‖ψ‖`.
    pub value: f64,
    /// `e^{μ‖ψ‖^{−p'}} (R/m)^{θ+1}/(θ+1)`.
    pub lower_bound: f64,
    /// `d log value / d log m` against the previous row.
    pub growth: f64,
    /// `(θ+1)(μ/μ₀ (1 + 2^p ε ‖φ'‖^p_∞)^{−1} − 1)`.
    pub predicted: f64,
}

/// Exponential functional along normalized Moser sequences.
pub fn blowup_table(mu: f64, space: &SpaceParams, m_list: &[f64], eps: f64) -> Result<Vec<BlowupRow>> {
    if !(mu >= 0.0) {
        return invalid(format!("μ must be nonnegative, got {mu}"));
    }
    let m0 = mu0(space.theta, space.k, space.p)?;
    let mut rows: Vec<BlowupRow> = Vec::with_capacity(m_list.len());
    for &m in m_list {
        if !(m > 1.0) {
            return invalid(format!("m must exceed 1, got {m}"));
        }
        let seq = MoserSequence::new(space.k, space.radius, m.ln(), eps, space.k)?;
        let report = sequence_norm_report(&seq, space)?;
        let norm = report.norm_p.powf(1.0 / space.p);
        let (value, lower_bound) = moser_functional_sequence(&seq, norm, mu, space.p, space.theta)?;
        let growth = rows
            .last()
            .map_or(f64::NAN, |prev| (value / prev.value).ln() / (m / prev.m).ln());
        let predicted = (space.theta + 1.0)
            * (mu / m0 / (1.0 + 2f64.powf(space.p) * eps * report.slope_sup.powf(space.p)) - 1.0);
        rows.push(BlowupRow { m, norm, value, lower_bound, growth, predicted });
    }
    Ok(rows)
}
