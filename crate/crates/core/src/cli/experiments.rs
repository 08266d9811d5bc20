//! The named experiments. Each one reads its parameter table up front and
//! returns a job that fills in the report.

use super::config::{ConfigError, ConfigResult, ExperimentConfig, Section};
use super::report::{num, Report, Table};
use crate::corpus::{hardy_corpus, k1_corpus, random_smooth_source};
use crate::error::{Error, Result};
use crate::functions::RadialFunction;
use crate::moser::{
    blowup_table, critical_k1_sweep, luxemburg_norm, maximize_lmu, mu0, profile_phi, profile_slope_sup,
    sequence_norm_report, MaximizeConfig, MoserSequence,
};
use crate::operators::{c1n_closed_form, coefficient_table, gamma_product_identity, green_roundtrip_error, mu0_navier};
use crate::pde::{
    estimate_m_delta, solve_exp, solve_power, Coefficient, ExpProblem, MDeltaConfig, Nonlinearity, PowerProblem,
    SolveConfig, SolveReport,
};
use crate::quadrature::NodalRule;
use crate::spaces::{
    embedding_exponent, hardy_constant, hardy_near_extremal, hardy_ratio, sobolev_norm, truncated_norms, Embedding,
    Regime, SpaceParams,
};
use crate::special::factorial;

pub type Job = Box<dyn FnOnce(&mut Report) -> Result<()>>;

/// Reads the experiment's table and returns the job that runs it.
pub fn prepare(cfg: &ExperimentConfig, name: &str) -> ConfigResult<(Table, Job)> {
    let s = cfg.section(name);
    let out = match name {
        "regimes" => regimes(cfg, &s),
        "norms" => norms(cfg, &s),
        "verify-hardy" => verify_hardy(cfg, &s),
        "verify-embedding-sharpness" => embedding_sharpness(cfg, &s),
        "moser-norms" => moser_norms(cfg, &s),
        "blowup" => blowup(cfg, &s),
        "maximize" => maximize(cfg, &s),
        "critical-k1" => critical_k1(cfg, &s),
        "navier-constants" => navier_constants(cfg, &s),
        "coefficients" => coefficients(cfg, &s),
        "green-roundtrip" => green_roundtrip(cfg, &s),
        "solve-power" => power(cfg, &s),
        "solve-exp" => exp(cfg, &s),
        other => return Err(ConfigError(format!("unknown experiment `{other}`"))),
    }?;
    s.finish()?;
    Ok(out)
}

fn cfg_err(section: &str, e: Error) -> ConfigError {
    ConfigError(format!("[{section}] {e}"))
}

fn space(s: &Section, name: &str, default_alpha: &[f64]) -> ConfigResult<SpaceParams> {
    let k = s.usize("k", default_alpha.len() - 1)?;
    let p = s.f64("p", 2.0)?;
    let radius = s.f64("radius", 1.0)?;
    let alpha = s.f64_list("alpha", default_alpha)?;
    let theta = s.f64("theta", 0.0)?;
    SpaceParams::new(k, p, radius, alpha, theta).map_err(|e| cfg_err(name, e))
}

fn require_atm(sp: &SpaceParams, name: &str) -> ConfigResult<()> {
    if sp.regime() != Regime::AdamsTrudingerMoser {
        return Err(ConfigError(format!("[{name}] space must be critical (α_k = kp − 1), got σ = {}", sp.sigma())));
    }
    Ok(())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    (hi - lo) / hi.abs().max(f64::MIN_POSITIVE)
}

fn regimes(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let ks = s.usize_list("k", &[1, 2, 3])?;
    let ps = s.f64_list("p", &[1.5, 2.0, 3.0])?;
    let tops = s.f64_list("alpha-top", &[0.0, 1.0, 2.0, 3.0, 5.0, 8.0])?;
    let theta = s.f64("theta", 0.0)?;
    let tol = cfg.tol.unwrap_or(1e-12);
    let mut spaces = Vec::new();
    for &k in &ks {
        for &p in &ps {
            for &top in &tops {
                let mut alpha = vec![0.0; k + 1];
                alpha[k] = top;
                spaces.push(SpaceParams::new(k, p, 1.0, alpha, theta).map_err(|e| cfg_err("regimes", e))?);
            }
        }
    }
    let table = Table::new(&["k", "p", "alpha_k", "sigma", "regime", "embedding", "exponent"]);
    Ok((
        table,
        Box::new(move |rep| {
            let mut consistent = true;
            for sp in &spaces {
                let sigma = sp.sigma();
                let (kind, x) = match embedding_exponent(sp) {
                    Embedding::Lebesgue(q) => {
                        consistent &= rel(q, (theta + 1.0) * sp.p / sigma) <= tol;
                        ("lebesgue", q)
                    }
                    Embedding::Unbounded => ("exponential", f64::INFINITY),
                    Embedding::Holder(g) => ("holder", g),
                };
                consistent &= match sp.regime() {
                    Regime::Sobolev => sigma > 0.0,
                    Regime::Morrey => sigma < 0.0,
                    Regime::AdamsTrudingerMoser => sigma.abs() <= 1e-12,
                };
                rep.table.push(vec![
                    sp.k.to_string(),
                    num(sp.p),
                    num(sp.alpha[sp.k]),
                    num(sigma),
                    sp.regime().to_string(),
                    kind.to_string(),
                    num(x),
                ]);
            }
            rep.summary.entry("rows", spaces.len());
            rep.summary.check("classification", consistent, "regime follows the sign of σ; p* = (θ+1)p/σ");
            Ok(())
        }),
    ))
}

fn norms(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let sp = space(s, "norms", &[0.0, 1.0])?;
    if sp.k != 1 {
        return Err(ConfigError("[norms] the corpus has one derivative; key `k` must be 1".into()));
    }
    let tol = cfg.tol.unwrap_or(1e-10);
    let table = Table::new(&["function", "status", "norm", "luxemburg", "ratio"]);
    Ok((
        table,
        Box::new(move |rep| {
            let atm = sp.regime() == Regime::AdamsTrudingerMoser;
            let mut homogeneous = true;
            let mut finite = 0;
            for (name, u) in k1_corpus(sp.radius)? {
                let (status, n) = match sobolev_norm(&u, &sp) {
                    Ok(n) => ("ok", n),
                    Err(Error::Divergent(_)) => ("divergent", f64::INFINITY),
                    Err(e) => return Err(e),
                };
                let mut lux = f64::NAN;
                if status == "ok" {
                    finite += 1;
                    let n2 = sobolev_norm(&u.scaled(2.0), &sp)?;
                    homogeneous &= (n2 - 2.0 * n).abs() <= tol * n.max(1.0);
                    if atm {
                        lux = luxemburg_norm(&u, sp.theta, sp.p)?;
                        let l2 = luxemburg_norm(&u.scaled(2.0), sp.theta, sp.p)?;
                        homogeneous &= (l2 - 2.0 * lux).abs() <= 1e-8 * lux.max(1.0);
                    }
                }
                let ratio = if n > 0.0 && n.is_finite() { lux / n } else { f64::NAN };
                rep.table.push(vec![name, status.into(), num(n), num(lux), num(ratio)]);
            }
            rep.summary.entry("regime", sp.regime());
            rep.summary.entry("finite_members", finite);
            rep.summary.check("homogeneity", homogeneous, "‖2u‖ = 2‖u‖ for the norm and the Luxemburg norm");
            Ok(())
        }),
    ))
}

fn verify_hardy(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let pairs = s.pair_list("pairs", &[(2.0, 3.0), (2.0, 5.0), (3.0, 4.0)])?;
    let delta = s.f64("delta", 0.05)?;
    let fraction = s.f64("fraction", 0.95)?;
    let radius = s.f64("radius", 1.0)?;
    let tol = cfg.tol.unwrap_or(1e-6);
    for &(p, a) in &pairs {
        hardy_constant(p, a).map_err(|e| cfg_err("verify-hardy", e))?;
    }
    let table = Table::new(&["p", "alpha", "function", "ratio", "constant", "fraction"]);
    Ok((
        table,
        Box::new(move |rep| {
            let corpus = hardy_corpus(radius)?;
            let (mut below, mut sharp) = (true, true);
            let mut worst_fraction = f64::INFINITY;
            for &(p, alpha) in &pairs {
                let c = hardy_constant(p, alpha)?;
                let row = |name: String, r: f64, rep: &mut Report| {
                    rep.table.push(vec![num(p), num(alpha), name, num(r), num(c), num(r / c)]);
                };
                for (name, u) in &corpus {
                    let r = hardy_ratio(u, p, alpha, 1e-10)?;
                    below &= r <= c + tol;
                    row(name.clone(), r, rep);
                }
                let u = hardy_near_extremal(p, alpha, delta, radius)?;
                let r = hardy_ratio(&u, p, alpha, 1e-10)?;
                below &= r <= c + tol;
                sharp &= r >= fraction * c;
                worst_fraction = worst_fraction.min(r / c);
                row(format!("near-extremal-{delta}"), r, rep);
            }
            rep.summary.value("delta", delta);
            rep.summary.value("worst_near_extremal_fraction", worst_fraction);
            rep.summary.check("below_constant", below, format!("ratio <= p/(α−p+1) + {tol:e}"));
            rep.summary.check("near_extremal", sharp, format!("ratio >= {fraction} of the constant"));
            Ok(())
        }),
    ))
}

fn embedding_sharpness(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let sp = SpaceParams::new(1, s.f64("p", 1.0)?, s.f64("radius", 1.0)?, s.f64_list("alpha", &[1.0, 2.0])?, s.f64("theta", 1.0)?)
        .map_err(|e| cfg_err("verify-embedding-sharpness", e))?;
    let qs = s.f64_list("q", &[1.5, 2.0])?;
    let floors = s.f64_list("r-min", &[1e-4, 1e-5, 1e-6, 1e-7])?;
    let x_tol = s.f64("x-tol", 0.01)?;
    let tol = cfg.tol.unwrap_or(1e-8);
    if floors.len() < 2 || floors.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(ConfigError("[verify-embedding-sharpness] key `r-min` must be a decreasing list of at least two values".into()));
    }
    let table = Table::new(&["q", "r_min", "lq_norm", "log_reference", "x_norm", "x_limit", "x_gap"]);
    Ok((
        table,
        Box::new(move |rep| {
            let (mut grows, mut logarithmic, mut settles) = (true, true, true);
            let pstar = match embedding_exponent(&sp) {
                Embedding::Lebesgue(q) => q,
                _ => f64::NAN,
            };
            for &q in &qs {
                // ∫|u|^q r^θ over [r, R] is exactly log(R/r) for this exponent.
                let e = -(sp.theta + 1.0) / q;
                let u = RadialFunction::power(sp.radius, sp.radius.powf(-e), e, 1)?;
                let limit = sobolev_norm(&u, &sp)?;
                let mut prev = 0.0;
                for &f in &floors {
                    let r_min = f * sp.radius;
                    let (lq, x) = truncated_norms(&u, &sp, q, r_min)?;
                    let reference = (sp.radius / r_min).ln().powf(1.0 / q) * sp.radius.powf((sp.theta + 1.0) / q);
                    grows &= lq > prev;
                    logarithmic &= rel(lq, reference) <= tol;
                    settles &= rel(x, limit) <= x_tol;
                    prev = lq;
                    rep.table.push(vec![num(q), num(r_min), num(lq), num(reference), num(x), num(limit), num(rel(x, limit))]);
                }
            }
            rep.summary.value("critical_exponent", pstar);
            rep.summary.check("lq_increases", grows, "L^q norm strictly increases as the floor moves to 0");
            rep.summary.check("lq_unbounded", logarithmic, "L^q norm follows log(R/r_min)^{1/q}, which has no bound");
            rep.summary.check("x_norm_converges", settles, format!("X-norm within {x_tol} of its limit"));
            Ok(())
        }),
    ))
}

fn moser_norms(_cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let sp = space(s, "moser-norms", &[0.0, 1.0])?;
    require_atm(&sp, "moser-norms")?;
    let eps = s.f64("eps", 0.05)?;
    let log_ms = s.f64_list("log-m", &[10.0, 20.0])?;
    let slack = s.f64("slack", 0.5)?;
    let table = Table::new(&["log_m", "norm_p", "rescaled", "lower", "upper"]);
    Ok((
        table,
        Box::new(move |rep| {
            let kf = factorial(sp.k - 1).powf(sp.p);
            let sup = profile_slope_sup(&profile_phi(sp.k)?);
            let upper = kf * (1.0 + 16.0 * eps * sup.powf(sp.p)) + slack;
            let mut inside = true;
            for &lm in &log_ms {
                let seq = MoserSequence::new(sp.k, sp.radius, lm, eps, sp.k)?;
                let r = sequence_norm_report(&seq, &sp)?;
                inside &= r.rescaled >= kf && r.rescaled <= upper;
                rep.table.push(vec![num(lm), num(r.norm_p), num(r.rescaled), num(kf), num(upper)]);
            }
            rep.summary.value("slope_sup", sup);
            rep.summary.check("asymptotic_window", inside, "‖ψ‖^p (log m)^{p−1} inside the window");
            Ok(())
        }),
    ))
}

fn blowup(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let sp = space(s, "blowup", &[0.0, 1.0])?;
    require_atm(&sp, "blowup")?;
    let mu = s.f64("mu", 1.5)?;
    let eps = s.f64("eps", 0.05)?;
    let ms = s.f64_list("m", &[1e2, 1e3, 1e4, 1e5, 1e6])?;
    let grow = s.f64("growth-factor", 10.0)?;
    let stay = s.f64("stay-factor", 2.0)?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let table = Table::new(&["m", "norm", "value", "lower_bound", "growth", "predicted"]);
    Ok((
        table,
        Box::new(move |rep| {
            let mu0 = mu0(sp.theta, sp.k, sp.p)?;
            let rows = blowup_table(mu, &sp, &ms, eps)?;
            let mut bounded_below = true;
            for r in &rows {
                bounded_below &= r.value >= r.lower_bound * (1.0 - 1e-12);
                rep.table.push(vec![num(r.m), num(r.norm), num(r.value), num(r.lower_bound), num(r.growth), num(r.predicted)]);
            }
            let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
            let factor = values.last().unwrap() / values[0];
            rep.summary.value("mu", mu);
            rep.summary.value("mu0", mu0);
            rep.summary.value("factor_last_over_first", factor);
            rep.summary.check("lower_bound", bounded_below, "value >= e^{μ‖ψ‖^{−p'}} (R/m)^{θ+1}/(θ+1)");
            if mu == 0.0 {
                let v = sp.radius.powf(sp.theta + 1.0) / (sp.theta + 1.0);
                let ok = values.iter().all(|x| rel(*x, v) <= tol);
                rep.summary.check("constant_column", ok, format!("every value equals R^(θ+1)/(θ+1) = {}", num(v)));
            } else if mu > mu0 {
                rep.summary.check("blows_up", factor >= grow, format!("last/first >= {grow}"));
            } else {
                let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                rep.summary.check("stays_bounded", hi / lo <= stay, format!("max/min <= {stay}"));
            }
            Ok(())
        }),
    ))
}

fn maximize(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let sp = space(s, "maximize", &[0.0, 1.0])?;
    require_atm(&sp, "maximize")?;
    let frac = s.f64("mu-fraction", 0.5)?;
    let mut mc = MaximizeConfig::default();
    mc.n = cfg.grid_n.unwrap_or(mc.n);
    mc.r_min = s.f64("r-min", mc.r_min)?;
    mc.max_iters = s.usize("max-iters", mc.max_iters)?;
    mc.tol = s.f64("tol", mc.tol)?;
    mc.restarts = s.usize("restarts", mc.restarts)?;
    mc.seed = match s.opt_u64("seed")? {
        Some(x) => x,
        None => cfg.require_seed()?,
    };
    let agree = cfg.tol.unwrap_or(1e-3);
    let table = Table::new(&["restart", "value"]);
    Ok((
        table,
        Box::new(move |rep| {
            let mu = frac * mu0(sp.theta, sp.k, sp.p)?;
            let r = maximize_lmu(mu, &sp, &mc)?;
            for (i, v) in r.restart_values.iter().enumerate() {
                rep.table.push(vec![i.to_string(), num(*v)]);
            }
            let floor = sp.radius.powf(sp.theta + 1.0) / (sp.theta + 1.0);
            rep.summary.value("mu", mu);
            rep.summary.value("value", r.value);
            rep.summary.value("norm", r.norm);
            rep.summary.entry("iterations", r.iterations);
            rep.summary.check("converged", r.converged, format!("relative change below {:e}", mc.tol));
            rep.summary.check("restarts_agree", spread(&r.restart_values) <= agree, format!("relative spread <= {agree:e}"));
            rep.summary.check("unit_norm", (r.norm - 1.0).abs() <= 1e-6, "|‖u‖ − 1| <= 1e-6");
            rep.summary.check("beats_zero", r.value >= floor * (1.0 - 1e-12), "value >= R^(θ+1)/(θ+1)");
            Ok(())
        }),
    ))
}

fn critical_k1(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let a = s.f64("a", 1.0)?;
    let theta = s.f64("theta", 0.0)?;
    let alpha0 = s.f64("alpha0", 0.0)?;
    let p = s.f64("p", 2.0)?;
    let radii = s.f64_list("radius", &[0.5, 1.0, 2.0])?;
    let bound = s.f64("bound", 100.0)?;
    let tol = cfg.tol.unwrap_or(1e-12);
    let table = Table::new(&["radius", "function", "raw_norm", "admissible", "value"]);
    Ok((
        table,
        Box::new(move |rep| {
            let (mut zero_ok, mut bounded) = (true, true);
            let mut worst: f64 = 0.0;
            for &radius in &radii {
                for row in critical_k1_sweep(a, theta, alpha0, p, &k1_corpus(radius)?)? {
                    if row.name == "zero" {
                        zero_ok &= rel(row.value, 1.0 / (theta + 1.0)) <= tol;
                    } else if row.admissible {
                        bounded &= row.value.is_finite() && row.value <= bound;
                        worst = worst.max(row.value);
                    }
                    rep.table.push(vec![num(radius), row.name, num(row.raw_norm), row.admissible.to_string(), num(row.value)]);
                }
            }
            rep.summary.value("largest_value", worst);
            rep.summary.check("zero_member", zero_ok, "u = 0 gives 1/(θ+1)");
            rep.summary.check("bounded", bounded, format!("admissible members stay below {bound}"));
            Ok(())
        }),
    ))
}

fn navier_constants(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let ks = s.usize_list("k", &[1, 2])?;
    let thetas = s.f64_list("theta", &[0.0])?;
    let gammas = s.f64_list("gamma", &[3.0])?;
    let ps = s.f64_list("p", &[2.0])?;
    let tol = cfg.tol.unwrap_or(1e-12);
    let table = Table::new(&["k", "theta", "gamma", "p", "mu0", "reference"]);
    Ok((
        table,
        Box::new(move |rep| {
            let mut ok = true;
            for &k in &ks {
                for &theta in &thetas {
                    for &gamma in &gammas {
                        for &p in &ps {
                            let m = mu0_navier(theta, k, gamma, p)?;
                            let reference = match k {
                                1 => theta + 1.0,
                                2 => (theta + 1.0) * (gamma - 1.0).powf(p / (p - 1.0)),
                                _ => f64::NAN,
                            };
                            if reference.is_finite() {
                                ok &= rel(m, reference) <= tol;
                            }
                            rep.table.push(vec![k.to_string(), num(theta), num(gamma), num(p), num(m), num(reference)]);
                        }
                    }
                }
            }
            rep.summary.check("closed_forms", ok, format!("k = 1, 2 match their formulas to {tol:e}"));
            Ok(())
        }),
    ))
}

fn coefficients(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let gamma = s.f64("gamma", 13.5)?;
    let n_max = s.usize("n-max", 6)?;
    let ks = s.usize_list("identity-k", &[4, 6])?;
    let id_gamma = s.f64("identity-gamma", 9.5)?;
    let id_p = s.f64("identity-p", 2.0)?;
    let tol = cfg.tol.unwrap_or(1e-12);
    if n_max == 0 {
        return Err(ConfigError("[coefficients] key `n-max` must be at least 1".into()));
    }
    let table = Table::new(&["kind", "index", "lhs", "rhs", "rel_error"]);
    Ok((
        table,
        Box::new(move |rep| {
            let t = coefficient_table(gamma, n_max);
            let mut c_ok = true;
            for (n, row) in t.iter().enumerate().skip(1) {
                let c = c1n_closed_form(gamma, n)?;
                let e = (row[1] - c).abs() / c.abs().max(1.0);
                c_ok &= e <= tol;
                rep.table.push(vec!["c1n".into(), n.to_string(), num(row[1]), num(c), num(e)]);
            }
            let mut g_ok = true;
            for &k in &ks {
                let (l, r) = gamma_product_identity(k, id_gamma, id_p)?;
                let e = rel(l, r);
                g_ok &= e <= 1e-10;
                rep.table.push(vec!["gamma-product".into(), k.to_string(), num(l), num(r), num(e)]);
            }
            rep.summary.value("gamma", gamma);
            rep.summary.check("c1n_closed_form", c_ok, format!("recursion vs closed form to {tol:e}"));
            rep.summary.check("gamma_product", g_ok, "(γ−1)ΠC_i^(−1) vs the Γ product to 1e-10");
            Ok(())
        }),
    ))
}

fn green_roundtrip(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let gammas = s.f64_list("gamma", &[2.0, 3.0, 5.0])?;
    let count = s.usize("seeds", 10)?;
    let radius = s.f64("radius", 1.0)?;
    let n = cfg.grid_n.unwrap_or(2000);
    let seed = cfg.require_seed()?;
    let tol = cfg.tol.unwrap_or(1e-6);
    let table = Table::new(&["gamma", "seed", "rel_error", "boundary"]);
    Ok((
        table,
        Box::new(move |rep| {
            let (mut worst, mut exact): (f64, bool) = (0.0, true);
            for &gamma in &gammas {
                for i in 0..count as u64 {
                    let v = random_smooth_source(seed + i, radius);
                    let (e, b) = green_roundtrip_error(v, gamma, radius, n)?;
                    worst = worst.max(e);
                    exact &= b == 0.0;
                    rep.table.push(vec![num(gamma), (seed + i).to_string(), num(e), num(b)]);
                }
            }
            rep.summary.entry("grid_n", n);
            rep.summary.value("max_rel_error", worst);
            rep.summary.check("roundtrip", worst <= tol, format!("max relative error <= {tol:e}"));
            rep.summary.check("boundary", exact, "G_γ v(R) = 0 exactly");
            Ok(())
        }),
    ))
}

fn solve_config(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<SolveConfig> {
    let mut sc = SolveConfig::default();
    sc.n = cfg.grid_n.unwrap_or(sc.n);
    sc.r_min = s.f64("r-min", sc.r_min)?;
    sc.tol = s.f64("solver-tol", sc.tol)?;
    sc.max_iters = s.usize("max-iters", sc.max_iters)?;
    sc.floor = s.f64("floor", sc.floor)?;
    sc.restarts = s.usize("restarts", sc.restarts)?;
    Ok(sc)
}

struct Tolerances {
    residual: f64,
    boundary: f64,
    origin: f64,
    weak: f64,
}

fn tolerances(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<Tolerances> {
    Ok(Tolerances {
        residual: cfg.tol.unwrap_or(s.f64("residual-tol", 1e-6)?),
        boundary: s.f64("boundary-tol", 1e-8)?,
        origin: s.f64("origin-tol", 1e-3)?,
        weak: s.f64("weak-tol", 1e-5)?,
    })
}

fn solution_rows(rep: &mut Report, r: &SolveReport) {
    let g = r.solution.grid().nodes();
    for (i, x) in g.iter().enumerate() {
        rep.table.push(vec![num(*x), num(r.solution.u.values()[i]), num(r.solution.laplacian.values()[i])]);
    }
}

fn report_common(rep: &mut Report, r: &SolveReport, t: &Tolerances) {
    let e = &r.endpoints;
    let weak = r.weak_defects.iter().cloned().fold(0.0, f64::max);
    let s = &mut rep.summary;
    s.value("lambda", r.lambda);
    s.value("rayleigh", r.rayleigh);
    s.value("residual", r.residual);
    s.value("u_boundary", e.u_boundary);
    s.value("laplacian_boundary", e.laplacian_boundary);
    s.value("laplacian_origin", e.laplacian_origin);
    s.value("origin_defect", e.origin_defect);
    s.value("d3u_origin", e.d3u_origin);
    for (i, (x, v)) in e.d3u_samples.iter().enumerate() {
        s.entry(&format!("d3u_sample.{i}"), format!("{},{}", num(*x), num(*v)));
    }
    s.value("max_weak_defect", weak);
    s.entry("iterations", r.iterations);
    s.check("converged", r.converged, "");
    s.check("residual", r.residual <= t.residual, format!("strong residual <= {:e}", t.residual));
    s.check(
        "boundary",
        e.u_boundary.abs() <= t.boundary && e.laplacian_boundary.abs() <= t.boundary,
        format!("|u(R)|, |Δu(R)| <= {:e}", t.boundary),
    );
    s.check(
        "origin_defect",
        !e.unstable && e.origin_defect.abs() <= t.origin * e.laplacian_origin.abs(),
        format!("|u''(0) + Δu(0)/(α+1)| <= {:e}·|Δu(0)|", t.origin),
    );
    let decays = e.d3u_samples.windows(2).all(|w| w[1].1.abs() < w[0].1.abs());
    s.check("d3u_decay", decays, "|u'''| decreases toward the origin");
    s.check("weak_form", weak <= t.weak, format!("weak defects <= {:e}", t.weak));
}

fn coefficient(s: &Section) -> ConfigResult<Coefficient> {
    match s.string("g", "constant")?.as_str() {
        "constant" => Ok(Coefficient::Constant(s.f64("g-value", 1.0)?)),
        "affine" => Ok(Coefficient::Affine { a: s.f64("g-a", 1.0)?, b: s.f64("g-b", 1.0)? }),
        other => Err(ConfigError(format!("[solve-power] key `g`: unknown coefficient `{other}` (constant, affine)"))),
    }
}

fn power(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let problem = PowerProblem::new(
        s.f64("alpha", 4.0)?,
        s.f64("theta", 4.0)?,
        s.f64("p", 2.0)?,
        coefficient(s)?,
        s.f64("radius", 1.0)?,
    )
    .map_err(|e| cfg_err("solve-power", e))?;
    let mut sc = solve_config(cfg, s)?;
    sc.seed = cfg.seed.unwrap_or(0);
    let t = tolerances(cfg, s)?;
    let table = Table::new(&["r", "u", "laplacian"]);
    Ok((
        table,
        Box::new(move |rep| {
            let r = solve_power(&problem, &sc)?;
            solution_rows(rep, &r);
            report_common(rep, &r, &t);
            if let Some(c) = &r.scaling {
                rep.summary.value("scaling.residual_p_minus_2", c.residual_p_minus_2);
                rep.summary.value("scaling.residual_p_minus_1", c.residual_p_minus_1);
                rep.summary.entry("scaling.preferred", format!("{:?}", c.preferred));
            }
            Ok(())
        }),
    ))
}

fn exp(cfg: &ExperimentConfig, s: &Section) -> ConfigResult<(Table, Job)> {
    let theta = s.f64("theta", 3.0)?;
    let radius = s.f64("radius", 1.0)?;
    let f = match s.string("f", "exp-quadratic")?.as_str() {
        "linear" => Nonlinearity::Linear,
        "exp-quadratic" => Nonlinearity::ExpQuadratic { a: s.f64("a", 0.5)? },
        other => return Err(ConfigError(format!("[solve-exp] key `f`: unknown nonlinearity `{other}` (linear, exp-quadratic)"))),
    };
    let m_delta = s.opt_f64("m-delta")?;
    let mut sc = solve_config(cfg, s)?;
    sc.seed = cfg.require_seed()?;
    let t = tolerances(cfg, s)?;
    let mut t = t;
    if cfg.tol.is_none() && s.opt_f64("residual-tol")?.is_none() {
        t.residual = 1e-5;
    }
    let agree = s.f64("restart-tol", 1e-3)?;
    let table = Table::new(&["r", "u", "laplacian"]);
    Ok((
        table,
        Box::new(move |rep| {
            let md = match m_delta {
                Some(m) => m,
                None => estimate_m_delta(radius, &MDeltaConfig::default())?.value,
            };
            let problem = ExpProblem::new(theta, f, md, radius)?;
            let r = solve_exp(&problem, &sc)?;
            solution_rows(rep, &r);
            report_common(rep, &r, &t);
            let li = r.lambda_integral.unwrap_or(f64::NAN);
            let u = r.solution.u.values();
            let fu: Vec<f64> = u.iter().map(|v| problem.f(*v) * v).collect();
            let again = NodalRule::new(r.solution.grid(), theta)?.integrate(&fu);
            rep.summary.value("m_delta", md);
            rep.summary.value("lambda_integral", li);
            rep.summary.value("lambda_integral_recomputed", again);
            for (i, v) in r.restart_values.iter().enumerate() {
                rep.summary.value(&format!("restart.{i}"), *v);
            }
            rep.summary.check("self_consistency", rel(li, again) <= 1e-10, "∫f(u)u r^θ reproduced to 1e-10");
            rep.summary.check("restarts_agree", spread(&r.restart_values) <= agree, format!("relative spread <= {agree:e}"));
            if f == Nonlinearity::Linear {
                let lin = PowerProblem::new(3.0, theta, 2.0, Coefficient::Constant(1.0), radius)?;
                let pr = solve_power(&lin, &sc)?;
                rep.summary.value("power_lambda", pr.lambda);
                rep.summary.check("matches_power", rel(r.lambda, pr.lambda) <= 1e-4, "λ matches the α = 3, p = 2 power solver");
            }
            Ok(())
        }),
    ))
}
